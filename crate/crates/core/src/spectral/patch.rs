//! Spectral mass of the isotropic field over wavenumber cells.
//!
//! Wavenumbers are handled in units of `κ` internally, so the propagating
//! region is the unit disk. One hemisphere of the 3D isotropic spectrum
//! carries mass 1/2, as does one half-circle of the 2D spectrum.

use std::f64::consts::PI;

use super::lattice::WavenumberLattice;
use super::quadrature::{integrate, Tolerance};
use super::IsotropicField;
use crate::{Error, Result};

/// Quadrature tolerance for a single cell; cells carry O(1/L²) mass.
const CELL_TOLERANCE: Tolerance = Tolerance {
    abs: 1e-13,
    rel: 1e-11,
    max_subdivisions: 400,
};

/// Axis-aligned rectangle in the `(k_x, k_y)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavenumberPatch {
    pub kx_lo: f64,
    pub kx_hi: f64,
    pub ky_lo: f64,
    pub ky_hi: f64,
    pub kappa: f64,
}

impl WavenumberPatch {
    pub fn new(kx_lo: f64, kx_hi: f64, ky_lo: f64, ky_hi: f64, kappa: f64) -> Result<Self> {
        if !(kx_lo < kx_hi && ky_lo < ky_hi) {
            return Err(Error::InvalidArgument(format!(
                "empty patch [{kx_lo}, {kx_hi}] x [{ky_lo}, {ky_hi}]"
            )));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {kappa}")));
        }
        Ok(WavenumberPatch {
            kx_lo,
            kx_hi,
            ky_lo,
            ky_hi,
            kappa,
        })
    }

    /// The uniform cell of harmonic `(nx, ny)`: width `κ/L` along each axis,
    /// centred on `(κ n_x/L_x, κ n_y/L_y)`.
    pub fn cell(lattice: &WavenumberLattice, nx: i32, ny: i32, kappa: f64) -> Self {
        let (lx, ly) = (lattice.aperture_x(), lattice.aperture_y());
        WavenumberPatch {
            kx_lo: kappa * (nx as f64 - 0.5) / lx,
            kx_hi: kappa * (nx as f64 + 0.5) / lx,
            ky_lo: kappa * (ny as f64 - 0.5) / ly,
            ky_hi: kappa * (ny as f64 + 0.5) / ly,
            kappa,
        }
    }

    fn normalized(&self) -> [f64; 4] {
        [
            self.kx_lo / self.kappa,
            self.kx_hi / self.kappa,
            self.ky_lo / self.kappa,
            self.ky_hi / self.kappa,
        ]
    }

    /// Whether the patch overlaps the open propagation disk.
    pub fn meets_disk(&self) -> bool {
        let [xl, xh, yl, yh] = self.normalized();
        let cx = 0.0f64.clamp(xl, xh);
        let cy = 0.0f64.clamp(yl, yh);
        cx * cx + cy * cy < 1.0
    }
}

fn asin_clamped(y: f64, c: f64) -> f64 {
    if c <= 0.0 {
        return if y > 0.0 {
            0.5 * PI
        } else if y < 0.0 {
            -0.5 * PI
        } else {
            0.0
        };
    }
    (y / c).clamp(-1.0, 1.0).asin()
}

/// Mass of one hemisphere of the normalised 3D isotropic spectrum,
/// `dk_x dk_y / (4πκ sqrt(κ² − k²))`, inside `patch ∩ disk`.
///
/// The `k_y` integral is done in closed form (an arcsine); the remaining
/// `k_x = κ sin t` integral has a bounded, piecewise-smooth integrand whose
/// kinks (where the patch edge `|k_y|` meets the rim) are passed as
/// breakpoints.
pub fn isotropic_patch_integral(patch: &WavenumberPatch) -> Result<f64> {
    let [xl, xh, yl, yh] = patch.normalized();
    let (xl, xh) = (xl.max(-1.0), xh.min(1.0));
    let (yl, yh) = (yl.max(-1.0), yh.min(1.0));
    if xl >= xh || yl >= yh || !patch.meets_disk() {
        return Ok(0.0);
    }
    let (tl, th) = (xl.asin(), xh.asin());
    let mut breaks = Vec::with_capacity(4);
    for y in [yl, yh] {
        if y.abs() < 1.0 {
            let b = y.abs().acos();
            breaks.push(b);
            breaks.push(-b);
        }
    }
    let integrand = |t: f64| {
        let c = t.cos().max(0.0);
        c * (asin_clamped(yh, c) - asin_clamped(yl, c))
    };
    let est = integrate(integrand, tl, th, &breaks, CELL_TOLERANCE)?;
    Ok((est.value / (4.0 * PI)).max(0.0))
}

/// Mass of one half-circle of the normalised 2D isotropic spectrum,
/// `dk_x / (2π sqrt(κ² − k_x²))`, over `[kx_lo, kx_hi]` (closed form).
pub fn circular_patch_integral(kx_lo: f64, kx_hi: f64, kappa: f64) -> f64 {
    let lo = (kx_lo / kappa).clamp(-1.0, 1.0);
    let hi = (kx_hi / kappa).clamp(-1.0, 1.0);
    if hi <= lo {
        return 0.0;
    }
    (hi.asin() - lo.asin()) / (2.0 * PI)
}

/// Spectral mass carried by each harmonic of `lattice`, in lattice order.
///
/// Every integer node whose uniform cell overlaps the propagation disk
/// contributes its cell mass. Nodes inside the ellipse keep their own mass;
/// the few rim nodes just outside it are folded onto the propagating
/// harmonic nearest to their radial projection onto the ellipse, so the
/// cells partition the disk exactly and the masses sum to 1/2.
///
/// For [`IsotropicField::TwoD`] only the `n_y = 0` row is populated and the
/// cells are intervals of the circular spectrum.
pub fn harmonic_masses(lattice: &WavenumberLattice, field: IsotropicField) -> Result<Vec<f64>> {
    let kappa = crate::KAPPA;
    let mut masses = vec![0.0; lattice.len()];
    let bx = lattice.aperture_x().ceil() as i32 + 1;
    let by = match field {
        IsotropicField::ThreeD => lattice.aperture_y().ceil() as i32 + 1,
        IsotropicField::TwoD => 0,
    };
    for ny in -by..=by {
        for nx in -bx..=bx {
            let cell = WavenumberPatch::cell(lattice, nx, ny, kappa);
            let mass = match field {
                IsotropicField::ThreeD => {
                    if !cell.meets_disk() {
                        continue;
                    }
                    isotropic_patch_integral(&cell)?
                }
                IsotropicField::TwoD => circular_patch_integral(cell.kx_lo, cell.kx_hi, kappa),
            };
            if mass == 0.0 {
                continue;
            }
            let target = match lattice.index_of(nx, ny) {
                Some(i) => i,
                None => fold_target(lattice, nx, ny, field),
            };
            masses[target] += mass;
        }
    }
    Ok(masses)
}

fn fold_target(lattice: &WavenumberLattice, nx: i32, ny: i32, field: IsotropicField) -> usize {
    let (u, v) = lattice.direction(nx, ny);
    let rho = (u * u + v * v).sqrt();
    let (pu, pv) = (u / rho, v / rho);
    let mut best = (f64::INFINITY, 0);
    for (i, &(px, py)) in lattice.points().iter().enumerate() {
        if field == IsotropicField::TwoD && py != 0 {
            continue;
        }
        let (qu, qv) = lattice.direction(px, py);
        let d = (qu - pu).powi(2) + (qv - pv).powi(2);
        if d < best.0 {
            best = (d, i);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::KAPPA;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_disk_is_one_hemisphere() {
        let p = WavenumberPatch::new(-KAPPA, KAPPA, -KAPPA, KAPPA, KAPPA).unwrap();
        let v = isotropic_patch_integral(&p).unwrap(); assert!((v - 0.5).abs() < 1e-12, "{v}");
        // larger boxes are clipped to the disk
        let p = WavenumberPatch::new(-3.0 * KAPPA, 2.0 * KAPPA, -7.0, 9.0, KAPPA).unwrap();
        let v = isotropic_patch_integral(&p).unwrap(); assert!((v - 0.5).abs() < 1e-12, "{v}");
    }

    #[test]
    fn quadrants_are_equal() {
        let k = KAPPA;
        let q = [
            WavenumberPatch::new(0.0, k, 0.0, k, k).unwrap(),
            WavenumberPatch::new(-k, 0.0, 0.0, k, k).unwrap(),
            WavenumberPatch::new(-k, 0.0, -k, 0.0, k).unwrap(),
            WavenumberPatch::new(0.0, k, -k, 0.0, k).unwrap(),
        ];
        let vals: Vec<f64> = q.iter().map(|p| isotropic_patch_integral(p).unwrap()).collect();
        for v in &vals {
            assert!((v - 0.125).abs() < 1e-12);
        }
        assert!((vals.iter().sum::<f64>() - 0.5).abs() < 1e-12);
    }

    /// The square `[0, κ/√2]²` in spherical angles: for each azimuth φ the
    /// polar angle runs up to θ_max(φ), and the hemisphere measure
    /// `sin θ dθ dφ / 4π` integrates to `(1 − cos θ_max)/4π`.
    fn square_oracle() -> f64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let g = |phi: f64| {
            let sin_max = (s / phi.cos().max(phi.sin())).min(1.0);
            (1.0 - (1.0 - sin_max * sin_max).max(0.0).sqrt()) / (4.0 * PI)
        };
        // composite Simpson on [0, π/4], doubled by symmetry
        let n = 2_000_000;
        let h = 0.25 * PI / n as f64;
        let mut acc = g(0.0) + g(0.25 * PI);
        for i in 1..n {
            acc += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        2.0 * acc * h / 3.0
    }

    #[test]
    fn square_patch_matches_angular_oracle() {
        let edge = KAPPA * std::f64::consts::FRAC_1_SQRT_2;
        let p = WavenumberPatch::new(0.0, edge, 0.0, edge, KAPPA).unwrap();
        let value = isotropic_patch_integral(&p).unwrap();
        let oracle = square_oracle();
        assert!((value - oracle).abs() < 1e-8, "{value} vs {oracle}");
    }

    #[test]
    fn square_patch_matches_monte_carlo() {
        let edge = std::f64::consts::FRAC_1_SQRT_2;
        let p = WavenumberPatch::new(0.0, edge * KAPPA, 0.0, edge * KAPPA, KAPPA).unwrap();
        let value = isotropic_patch_integral(&p).unwrap();
        // uniform directions on the upper hemisphere: cos θ ~ U(0,1), φ ~ U(0, 2π)
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 2_000_000;
        let mut hits = 0usize;
        for _ in 0..n {
            let z: f64 = rng.random();
            let phi = 2.0 * PI * rng.random::<f64>();
            let r = (1.0 - z * z).sqrt();
            let (x, y) = (r * phi.cos(), r * phi.sin());
            if (0.0..=edge).contains(&x) && (0.0..=edge).contains(&y) {
                hits += 1;
            }
        }
        let frac = hits as f64 / n as f64;
        let se = 0.5 * (frac * (1.0 - frac) / n as f64).sqrt();
        assert!((0.5 * frac - value).abs() < 5.0 * se, "{} vs {value}", 0.5 * frac);
    }

    #[test]
    fn patches_outside_disk_are_empty() {
        let p = WavenumberPatch::new(0.8 * KAPPA, KAPPA, 0.8 * KAPPA, KAPPA, KAPPA).unwrap();
        assert!(!p.meets_disk());
        assert_eq!(isotropic_patch_integral(&p).unwrap(), 0.0);
        assert!(WavenumberPatch::new(1.0, 0.0, 0.0, 1.0, KAPPA).is_err());
    }

    #[test]
    fn circular_interval_masses() {
        assert!((circular_patch_integral(-KAPPA, KAPPA, KAPPA) - 0.5).abs() < 1e-15);
        assert!((circular_patch_integral(0.0, 5.0 * KAPPA, KAPPA) - 0.25).abs() < 1e-15);
        assert_eq!(circular_patch_integral(0.3, 0.1, KAPPA), 0.0);
    }

    #[test]
    fn grid_partition_sums_to_half() {
        // an exact partition of the bounding box into 7 x 5 uneven rectangles
        let xs = [-1.0, -0.8, -0.31, 0.0, 0.2, 0.55, 0.9, 1.0];
        let ys = [-1.0, -0.5, 0.1, 0.12, 0.7, 1.0];
        let mut sum = 0.0;
        for wx in xs.windows(2) {
            for wy in ys.windows(2) {
                let p = WavenumberPatch::new(wx[0] * KAPPA, wx[1] * KAPPA, wy[0] * KAPPA, wy[1] * KAPPA, KAPPA)
                    .unwrap();
                sum += isotropic_patch_integral(&p).unwrap();
            }
        }
        assert!((sum - 0.5).abs() < 1e-10);
    }

    #[test]
    fn harmonic_masses_partition_the_hemisphere() {
        for (lx, ly) in [(16.0, 16.0), (3.3, 5.2), (0.4, 0.4), (8.0, 0.5)] {
            let lat = WavenumberLattice::ellipse(lx, ly).unwrap();
            let m = harmonic_masses(&lat, IsotropicField::ThreeD).unwrap();
            assert!((m.iter().sum::<f64>() - 0.5).abs() < 1e-10, "{lx} x {ly}");
            assert!(m.iter().all(|&v| v >= 0.0));
        }
        let lat = WavenumberLattice::ellipse(16.0, 0.5).unwrap();
        let m = harmonic_masses(&lat, IsotropicField::TwoD).unwrap();
        assert!((m.iter().sum::<f64>() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn harmonic_masses_are_point_symmetric() {
        let lat = WavenumberLattice::ellipse(6.5, 4.0).unwrap();
        let m = harmonic_masses(&lat, IsotropicField::ThreeD).unwrap();
        for (i, &(x, y)) in lat.points().iter().enumerate() {
            let j = lat.index_of(-x, -y).unwrap();
            assert!((m[i] - m[j]).abs() < 1e-12);
        }
    }
}
