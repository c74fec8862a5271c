//! Special functions and wavenumber-domain geometry.
//!
//! The isotropic scalar field has its wavenumber spectrum on the sphere
//! `|k| = κ`. Sampling it with a planar aperture of `L_x × L_y` wavelengths
//! yields the lattice ellipse of propagating harmonics ([`lattice`]) and the
//! spectral mass carried by each harmonic's wavenumber cell ([`patch`]).

mod bessel;
pub mod lattice;
pub mod patch;
pub mod quadrature;

use std::f64::consts::PI;

pub use bessel::bessel_j0;
pub use lattice::WavenumberLattice;
pub use patch::{circular_patch_integral, isotropic_patch_integral, WavenumberPatch};

/// Dimensionality of the isotropic scattering environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsotropicField {
    /// Scattering confined to a plane containing a linear array; ACF `J₀(κd)`.
    TwoD,
    /// Full 3D isotropic scattering; ACF `sinc(2d)`.
    ThreeD,
}

impl IsotropicField {
    /// Closed-form autocorrelation at a separation of `distance` wavelengths.
    pub fn acf(self, distance: f64) -> f64 {
        match self {
            IsotropicField::TwoD => bessel_acf(distance),
            IsotropicField::ThreeD => sinc_acf(distance),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            IsotropicField::TwoD => "iso2d",
            IsotropicField::ThreeD => "iso3d",
        }
    }
}

impl std::str::FromStr for IsotropicField {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "iso2d" | "2d" => Ok(IsotropicField::TwoD),
            "iso3d" | "3d" => Ok(IsotropicField::ThreeD),
            other => Err(crate::Error::InvalidArgument(format!(
                "unknown field model `{other}` (expected iso2d or iso3d)"
            ))),
        }
    }
}

impl std::fmt::Display for IsotropicField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Coordinate difference between two spatial samples, in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LagVector {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl LagVector {
    pub fn new(dx: f64, dy: f64, dz: f64) -> Self {
        LagVector { dx, dy, dz }
    }

    pub fn between(a: [f64; 3], b: [f64; 3]) -> Self {
        LagVector::new(b[0] - a[0], b[1] - a[1], b[2] - a[2])
    }

    pub fn norm(&self) -> f64 {
        (self.dx * self.dx + self.dy * self.dy + self.dz * self.dz).sqrt()
    }
}

/// `sin(πx)` with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r == r.trunc() {
        return 0.0;
    }
    (PI * r).sin()
}

/// 3D isotropic ACF `sin(2πd) / (2πd)` at a separation of `distance`
/// wavelengths. Exactly zero at every multiple of half a wavelength.
pub fn sinc_acf(distance: f64) -> f64 {
    let d = distance.abs();
    if d == 0.0 {
        return 1.0;
    }
    sin_pi(2.0 * d) / (2.0 * PI * d)
}

/// 2D isotropic ACF `J₀(2πd)` at a separation of `distance` wavelengths.
pub fn bessel_acf(distance: f64) -> f64 {
    bessel_j0(2.0 * PI * distance.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_acf_reference_points() {
        assert_eq!(sinc_acf(0.0), 1.0);
        assert_eq!(sinc_acf(0.5), 0.0);
        assert!((sinc_acf(0.25) - 2.0 / PI).abs() < 1e-15);
        assert!((sinc_acf(0.25) - std::f64::consts::FRAC_2_PI).abs() < 1e-15);
    }

    #[test]
    fn sinc_acf_half_wavelength_zeros() {
        for k in 1..200 {
            assert_eq!(sinc_acf(k as f64 / 2.0), 0.0, "k = {k}");
        }
    }

    #[test]
    fn acfs_are_even_and_bounded() {
        for i in 0..2000 {
            let d = i as f64 * 0.0137;
            for field in [IsotropicField::TwoD, IsotropicField::ThreeD] {
                let v = field.acf(d);
                assert_eq!(v, field.acf(-d));
                assert!(v.abs() <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn bessel_acf_at_half_wavelength() {
        // J0(pi), from the trapezoidal oracle in the bessel tests
        assert!((bessel_acf(0.5) - (-0.304_242_177_644_093_9)).abs() < 1e-10);
        assert!((bessel_acf(0.5) - (-0.304242)).abs() < 1e-6);
    }

    #[test]
    fn lag_vector_norm() {
        let lag = LagVector::between([0.0, 0.0, 1.0], [3.0, 4.0, 1.0]);
        assert_eq!(lag.norm(), 5.0);
    }

    #[test]
    fn field_parsing() {
        assert_eq!("iso2d".parse::<IsotropicField>().unwrap(), IsotropicField::TwoD);
        assert_eq!("ISO3D".parse::<IsotropicField>().unwrap(), IsotropicField::ThreeD);
        assert!("iso4d".parse::<IsotropicField>().is_err());
    }
}
