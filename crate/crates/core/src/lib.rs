//! Holographic MIMO channel modelling and estimation.
//!
//! The crate covers three layers:
//!
//! * [`spectral`]: closed-form isotropic autocorrelation functions, the
//!   wavenumber lattice ellipse of a finite aperture and the isotropic
//!   spectral mass carried by each wavenumber cell.
//! * [`correlation`] and [`channel`]: Clarke-consistent spatial correlation
//!   matrices for uniform arrays, their eigen-subspaces, and two channel
//!   generators (correlated Gaussian `R^{1/2} e` and the Fourier plane-wave
//!   series).
//! * [`estimation`] and [`experiments`]: LS, MMSE and reduced-subspace LS
//!   estimators with closed-form NMSE oracles, plus seeded Monte Carlo
//!   harnesses for empirical ACFs and NMSE-versus-SNR sweeps.
//!
//! Lengths are expressed in wavelengths throughout, so the wavenumber is
//! `κ = 2π`.

pub mod channel;
pub mod correlation;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod linalg;
pub mod rng;
pub mod spectral;

pub use channel::{ChannelRealization, ModelTag, PlaneWaveModel};
pub use correlation::{ArrayGeometry, CorrelationMatrix, EigenDecomposition, Retention, Subspace};
pub use error::{Error, Result};
pub use estimation::{EstimatorKind, EstimatorSpec, PilotObservation};
pub use spectral::IsotropicField;

/// Wavenumber in wavelength units (`2π / λ` with `λ = 1`).
pub const KAPPA: f64 = 2.0 * std::f64::consts::PI;
