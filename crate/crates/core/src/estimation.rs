//! Pilot-based estimators of a SIMO channel `h` from `y = √γ h + n`,
//! `n ~ CN(0, I)`, with closed-form NMSE values.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{sample_cscg, ChannelRealization};
use crate::correlation::{CorrelationMatrix, Subspace};
use crate::linalg::CMatrix;
use crate::{Error, Result};

const SOLVE_RESIDUAL: f64 = 1e-10;

/// `y = √γ h + n` at pilot SNR `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotObservation {
    pub y: DVector<Complex64>,
    pub gamma: f64,
}

impl PilotObservation {
    pub fn new(y: DVector<Complex64>, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("observation has non-finite entries".into()));
        }
        Ok(PilotObservation { y, gamma })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("pilot SNR must be positive and finite, got {gamma}")))
    }
}

/// Noisy pilot observation of a SIMO realization.
pub fn observe_pilot<R: Rng + ?Sized>(h: &ChannelRealization, gamma: f64, rng: &mut R) -> Result<PilotObservation> {
    let h = h.simo()?;
    check_gamma(gamma)?;
    let n = sample_cscg(h.len(), rng);
    PilotObservation::new(h * Complex64::new(gamma.sqrt(), 0.0) + n, gamma)
}

/// `y = √γ h` without noise, for exactness checks.
pub fn observe_noiseless(h: &ChannelRealization, gamma: f64) -> Result<PilotObservation> {
    let h = h.simo()?;
    check_gamma(gamma)?;
    PilotObservation::new(h * Complex64::new(gamma.sqrt(), 0.0), gamma)
}

/// `ĥ = y / √γ`.
pub fn ls_estimate(obs: &PilotObservation) -> DVector<Complex64> {
    &obs.y / Complex64::new(obs.gamma.sqrt(), 0.0)
}

/// `ĥ = √γ R (γR + I)⁻¹ y` through a Cholesky solve.
pub fn mmse_estimate(obs: &PilotObservation, r: &CorrelationMatrix) -> Result<DVector<Complex64>> {
    check_dim(r.dim(), obs.len())?;
    let a = shifted(&r.to_complex(), obs.gamma);
    let chol = Cholesky::new(a.clone()).ok_or_else(|| Error::Solve("γR + I is not positive definite".into()))?;
    let x = chol.solve(&obs.y);
    let ynorm = obs.y.norm();
    if ynorm > 0.0 {
        let residual = (&a * &x - &obs.y).norm() / ynorm;
        if residual.is_nan() || residual > SOLVE_RESIDUAL {
            return Err(Error::Solve(format!("MMSE solve residual {residual:e} exceeds {SOLVE_RESIDUAL:e}")));
        }
    }
    Ok(r.entries().mul_vec(&x) * Complex64::new(obs.gamma.sqrt(), 0.0))
}

/// `ĥ = U Uᴴ y / √γ`.
pub fn rs_ls_estimate(obs: &PilotObservation, subspace: &Subspace) -> Result<DVector<Complex64>> {
    check_dim(subspace.dim(), obs.len())?;
    Ok(subspace.project(&ls_estimate(obs)))
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn shifted<T>(r: &DMatrix<T>, gamma: f64) -> DMatrix<T>
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    let n = r.nrows();
    let mut a = r * T::from_real(gamma);
    for i in 0..n {
        a[(i, i)] += T::one();
    }
    a
}

/// The four estimators compared in the NMSE sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    Ls,
    Mmse,
    /// Projection onto the true channel subspace.
    RsLs,
    /// Projection onto the isotropic subspace of the same array.
    RsLsConservative,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Ls,
        EstimatorKind::Mmse,
        EstimatorKind::RsLs,
        EstimatorKind::RsLsConservative,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            EstimatorKind::Ls => "ls",
            EstimatorKind::Mmse => "mmse",
            EstimatorKind::RsLs => "rsls",
            EstimatorKind::RsLsConservative => "rsls-iso",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.tag() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown estimator `{s}` (expected ls, mmse, rsls or rsls-iso)")))
    }
}

/// An estimator together with the statistics it needs.
#[derive(Debug, Clone)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub correlation: Option<CorrelationMatrix>,
    pub subspace: Option<Subspace>,
}

impl EstimatorSpec {
    pub fn ls() -> Self {
        EstimatorSpec {
            kind: EstimatorKind::Ls,
            correlation: None,
            subspace: None,
        }
    }

    pub fn mmse(r: CorrelationMatrix) -> Self {
        EstimatorSpec {
            kind: EstimatorKind::Mmse,
            correlation: Some(r),
            subspace: None,
        }
    }

    pub fn rs_ls(subspace: Subspace) -> Self {
        EstimatorSpec {
            kind: EstimatorKind::RsLs,
            correlation: None,
            subspace: Some(subspace),
        }
    }

    pub fn rs_ls_conservative(subspace: Subspace) -> Self {
        EstimatorSpec {
            kind: EstimatorKind::RsLsConservative,
            correlation: None,
            subspace: Some(subspace),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let missing = |what: &str| Err(Error::InvalidArgument(format!("{} estimator requires a {what}", self.kind)));
        match self.kind {
            EstimatorKind::Ls => Ok(()),
            EstimatorKind::Mmse if self.correlation.is_none() => missing("correlation matrix"),
            EstimatorKind::RsLs | EstimatorKind::RsLsConservative if self.subspace.is_none() => missing("subspace"),
            _ => Ok(()),
        }
    }

    pub fn estimate(&self, obs: &PilotObservation) -> Result<DVector<Complex64>> {
        self.validate()?;
        match self.kind {
            EstimatorKind::Ls => Ok(ls_estimate(obs)),
            EstimatorKind::Mmse => mmse_estimate(obs, self.correlation.as_ref().expect("validated")),
            EstimatorKind::RsLs | EstimatorKind::RsLsConservative => {
                rs_ls_estimate(obs, self.subspace.as_ref().expect("validated"))
            }
        }
    }
}

/// The linear MMSE map `G = √γ (γR + I)⁻¹ R` at one SNR, formed by a
/// multi-right-hand-side Cholesky solve (`R` commutes with `γR + I`).
#[derive(Debug, Clone)]
pub struct MmseFilter {
    gain: CMatrix,
    gamma: f64,
}

impl MmseFilter {
    pub fn new(r: &CorrelationMatrix, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let s = gamma.sqrt();
        let gain = match r.entries() {
            CMatrix::Real(m) => {
                let a = shifted(m, gamma);
                let chol = Cholesky::<f64, Dyn>::new(a).ok_or_else(|| Error::Solve("γR + I is not positive definite".into()))?;
                let mut g = chol.solve(m) * s;
                g = (&g + g.transpose()) * 0.5;
                CMatrix::Real(g)
            }
            CMatrix::Complex(m) => {
                let a = shifted(m, gamma);
                let chol = Cholesky::new(a).ok_or_else(|| Error::Solve("γR + I is not positive definite".into()))?;
                let g = chol.solve(m) * Complex64::new(s, 0.0);
                CMatrix::Complex((&g + g.adjoint()) * Complex64::new(0.5, 0.0))
            }
        };
        Ok(MmseFilter { gain, gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gain(&self) -> &CMatrix {
        &self.gain
    }

    /// Estimates for every column of `y`.
    pub fn apply(&self, y: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        self.gain.mul(y)
    }

    /// Exact `E‖Gy − h‖²` when `h ~ CN(0, R_true)`:
    /// `tr((I − √γG) R (I − √γG)ᴴ) + tr(G Gᴴ)`.
    pub fn error_power(&self, r_true: &CorrelationMatrix) -> Result<f64> {
        let n = r_true.dim();
        check_dim(self.gain.nrows(), n)?;
        let s = self.gamma.sqrt();
        let g = self.gain.to_complex();
        let residual = DMatrix::<Complex64>::identity(n, n) - &g * Complex64::new(s, 0.0);
        let residual = CMatrix::from_complex(residual);
        let bias = residual.mul(&r_true.entries().mul_adjoint(&residual).to_complex());
        let bias_trace: f64 = (0..n).map(|i| bias[(i, i)].re).sum();
        let noise = self.gain.frobenius_norm().powi(2);
        Ok(bias_trace + noise)
    }

    /// `tr(R) − √γ tr(G R)`: the error power when the filter was built from
    /// the true correlation `r` itself.
    pub fn matched_error_power(&self, r: &CorrelationMatrix) -> Result<f64> {
        let n = r.dim();
        check_dim(self.gain.nrows(), n)?;
        let mut tr_gr = 0.0;
        for j in 0..n {
            for i in 0..n {
                tr_gr += (self.gain.get(i, j) * r.get(j, i)).re;
            }
        }
        Ok(r.trace() - self.gamma.sqrt() * tr_gr)
    }
}

/// Closed-form `E‖ĥ − h‖² / tr(R_true)` for `h ~ CN(0, R_true)`.
///
/// LS gives `N/(γ tr R)`; MMSE the linear-estimator error of its filter
/// (equal to `tr(R − γR(γR+I)⁻¹R)/tr R` when the filter's `R` is `R_true`);
/// RS-LS `(r/γ + tr((I − UUᴴ) R))/tr R`, where the trace term is the
/// leakage of `R_true` outside the subspace.
pub fn analytic_nmse(spec: &EstimatorSpec, gamma: f64, r_true: &CorrelationMatrix) -> Result<f64> {
    spec.validate()?;
    check_gamma(gamma)?;
    let n = r_true.dim();
    let power = r_true.trace();
    let err = match spec.kind {
        EstimatorKind::Ls => n as f64 / gamma,
        EstimatorKind::Mmse => {
            let r = spec.correlation.as_ref().expect("validated");
            check_dim(r.dim(), n)?;
            MmseFilter::new(r, gamma)?.error_power(r_true)?
        }
        EstimatorKind::RsLs | EstimatorKind::RsLsConservative => {
            let s = spec.subspace.as_ref().expect("validated");
            check_dim(s.dim(), n)?;
            s.rank() as f64 / gamma + leakage(s, r_true)
        }
    };
    Ok(err / power)
}

/// `tr((I − UUᴴ) R) = tr R − Σ_k u_kᴴ R u_k`, clamped at zero.
pub fn leakage(subspace: &Subspace, r: &CorrelationMatrix) -> f64 {
    if subspace.rank() == 0 {
        return r.trace();
    }
    let u = subspace.basis().to_complex();
    let ru = r.entries().mul(&u);
    let captured: f64 = u.iter().zip(ru.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    (r.trace() - captured).max(0.0)
}
