use crate::{Error, Result};

/// Integer wavenumber harmonics `(n_x, n_y)` of an `L_x × L_y` aperture that
/// satisfy `(n_x/L_x)² + (n_y/L_y)² ≤ 1`, i.e. the propagating plane waves.
///
/// Points are stored row-major: ascending `n_y`, then ascending `n_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberLattice {
    half_x: f64,
    half_y: f64,
    points: Vec<(i32, i32)>,
}

impl WavenumberLattice {
    /// Enumerates the lattice ellipse for apertures of `l_x × l_y` wavelengths.
    pub fn ellipse(l_x: f64, l_y: f64) -> Result<Self> {
        if !(l_x > 0.0 && l_y > 0.0 && l_x.is_finite() && l_y.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "lattice apertures must be positive and finite, got {l_x} x {l_y}"
            )));
        }
        let my = l_y.floor() as i32;
        let mut points = Vec::new();
        for ny in -my..=my {
            let mx = row_half_width(l_x, l_y, ny);
            for nx in -mx..=mx {
                points.push((nx, ny));
            }
        }
        Ok(WavenumberLattice {
            half_x: l_x,
            half_y: l_y,
            points,
        })
    }

    /// A single harmonic at the origin, used for the transmit side of SIMO links.
    pub fn origin() -> Self {
        WavenumberLattice {
            half_x: 0.5,
            half_y: 0.5,
            points: vec![(0, 0)],
        }
    }

    pub fn aperture_x(&self) -> f64 {
        self.half_x
    }

    pub fn aperture_y(&self) -> f64 {
        self.half_y
    }

    pub fn points(&self) -> &[(i32, i32)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, nx: i32, ny: i32) -> bool {
        in_ellipse(self.half_x, self.half_y, nx, ny)
    }

    /// Position of `(nx, ny)` in [`points`](Self::points), if present.
    pub fn index_of(&self, nx: i32, ny: i32) -> Option<usize> {
        self.points.binary_search_by(|&(px, py)| (py, px).cmp(&(ny, nx))).ok()
    }

    /// Largest `|n_x|` and `|n_y|` present.
    pub fn extent(&self) -> (i32, i32) {
        self.points
            .iter()
            .fold((0, 0), |(ex, ey), &(x, y)| (ex.max(x.abs()), ey.max(y.abs())))
    }

    /// Normalised direction cosines `(n_x/L_x, n_y/L_y)` of a harmonic.
    pub fn direction(&self, nx: i32, ny: i32) -> (f64, f64) {
        (nx as f64 / self.half_x, ny as f64 / self.half_y)
    }

    /// Evanescent harmonics in the bounding box `[-⌈L_x⌉-1, ⌈L_x⌉+1] × [-⌈L_y⌉-1, ⌈L_y⌉+1]`.
    /// Reported for inspection only; they never carry channel power.
    pub fn evanescent_ring(&self) -> Vec<(i32, i32)> {
        let bx = self.half_x.ceil() as i32 + 1;
        let by = self.half_y.ceil() as i32 + 1;
        let mut out = Vec::new();
        for ny in -by..=by {
            for nx in -bx..=bx {
                if !self.contains(nx, ny) {
                    out.push((nx, ny));
                }
            }
        }
        out
    }
}

fn in_ellipse(l_x: f64, l_y: f64, nx: i32, ny: i32) -> bool {
    let u = nx as f64 / l_x;
    let v = ny as f64 / l_y;
    u * u + v * v <= 1.0
}

fn row_half_width(l_x: f64, l_y: f64, ny: i32) -> i32 {
    let v = ny as f64 / l_y;
    let mut mx = (l_x * (1.0 - v * v).max(0.0).sqrt()).floor() as i32;
    // the floor can land one off when the boundary falls on an integer
    while mx >= 0 && !in_ellipse(l_x, l_y, mx, ny) {
        mx -= 1;
    }
    while in_ellipse(l_x, l_y, mx + 1, ny) {
        mx += 1;
    }
    mx
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(l_x: f64, l_y: f64) -> Vec<(i32, i32)> {
        let bx = l_x.ceil() as i32 + 2;
        let by = l_y.ceil() as i32 + 2;
        let mut pts = Vec::new();
        for ny in -by..=by {
            for nx in -bx..=bx {
                let u = nx as f64 / l_x;
                let v = ny as f64 / l_y;
                if u * u + v * v <= 1.0 {
                    pts.push((nx, ny));
                }
            }
        }
        pts
    }

    #[test]
    fn unit_aperture_has_five_points() {
        let lat = WavenumberLattice::ellipse(1.0, 1.0).unwrap();
        let mut pts = lat.points().to_vec();
        pts.sort();
        assert_eq!(pts, vec![(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]);
        assert_eq!(lat.points(), &[(0, -1), (-1, 0), (0, 0), (1, 0), (0, 1)]);
    }

    #[test]
    fn sub_wavelength_aperture_keeps_only_origin() {
        let lat = WavenumberLattice::ellipse(0.4, 0.4).unwrap();
        assert_eq!(lat.points(), &[(0, 0)]);
    }

    #[test]
    fn sixteen_wavelength_aperture_count() {
        let lat = WavenumberLattice::ellipse(16.0, 16.0).unwrap();
        let oracle = brute_force(16.0, 16.0);
        assert_eq!(lat.len(), oracle.len());
        assert_eq!(lat.len(), 797);
        let area = std::f64::consts::PI * 256.0;
        assert!((lat.len() as f64 - area).abs() / area < 0.15);
    }

    #[test]
    fn rejects_non_positive_apertures() {
        assert!(WavenumberLattice::ellipse(0.0, 1.0).is_err());
        assert!(WavenumberLattice::ellipse(1.0, -2.0).is_err());
        assert!(WavenumberLattice::ellipse(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn evanescent_ring_is_disjoint_from_lattice() {
        let lat = WavenumberLattice::ellipse(3.0, 2.0).unwrap();
        let ring = lat.evanescent_ring();
        assert!(ring.iter().all(|&(x, y)| !lat.contains(x, y)));
        assert!(ring.contains(&(4, 0)));
    }

    #[test]
    fn index_lookup() {
        let lat = WavenumberLattice::ellipse(4.5, 3.0).unwrap();
        for (i, &(x, y)) in lat.points().iter().enumerate() {
            assert_eq!(lat.index_of(x, y), Some(i));
        }
        assert_eq!(lat.index_of(5, 0), None);
    }

    proptest! {
        #[test]
        fn matches_brute_force_and_is_symmetric(l_x in 0.05f64..12.0, l_y in 0.05f64..12.0) {
            let lat = WavenumberLattice::ellipse(l_x, l_y).unwrap();
            prop_assert_eq!(lat.points().to_vec(), brute_force(l_x, l_y));
            for &(x, y) in lat.points() {
                prop_assert!(lat.contains(-x, -y));
                let (u, v) = lat.direction(x, y);
                prop_assert!(u * u + v * v <= 1.0);
            }
            let mut sorted = lat.points().to_vec();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), lat.len());
        }

        #[test]
        fn large_apertures_track_ellipse_area(l_x in 4.0f64..20.0, l_y in 4.0f64..20.0) {
            let lat = WavenumberLattice::ellipse(l_x, l_y).unwrap();
            let area = std::f64::consts::PI * l_x * l_y;
            prop_assert!((lat.len() as f64 - area).abs() / area < 0.15);
        }
    }
}
