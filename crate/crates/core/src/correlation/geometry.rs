use std::fmt;
use std::str::FromStr;

use crate::spectral::WavenumberLattice;
use crate::{Error, Result};

/// Uniform rectangular array in the `z = offset_z` plane.
///
/// Lengths are in wavelengths. Elements sit on a grid centred on the z-axis:
/// element `(i, j)` is at `((i − (n_x−1)/2)·Δ_x, (j − (n_y−1)/2)·Δ_y, z)` and
/// has flat index `i·n_y + j`. `n_y = 1` gives a ULA along x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    n_x: usize,
    n_y: usize,
    spacing_x: f64,
    spacing_y: f64,
    offset_z: f64,
}

impl ArrayGeometry {
    pub fn new(n_x: usize, n_y: usize, spacing_x: f64, spacing_y: f64) -> Result<Self> {
        if n_x == 0 || n_y == 0 {
            return Err(Error::InvalidGeometry(format!(
                "element grid must be non-empty, got {n_x} x {n_y}"
            )));
        }
        for (axis, s) in [("x", spacing_x), ("y", spacing_y)] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "spacing along {axis} must be positive and finite, got {s}"
                )));
            }
        }
        Ok(ArrayGeometry {
            n_x,
            n_y,
            spacing_x,
            spacing_y,
            offset_z: 0.0,
        })
    }

    pub fn ula(n: usize, spacing: f64) -> Result<Self> {
        Self::new(n, 1, spacing, spacing)
    }

    pub fn upa(n_x: usize, n_y: usize, spacing: f64) -> Result<Self> {
        Self::new(n_x, n_y, spacing, spacing)
    }

    /// A lone element, the transmit side of a SIMO link.
    pub fn single() -> Self {
        ArrayGeometry {
            n_x: 1,
            n_y: 1,
            spacing_x: 0.5,
            spacing_y: 0.5,
            offset_z: 0.0,
        }
    }

    pub fn with_offset_z(mut self, offset_z: f64) -> Result<Self> {
        if !offset_z.is_finite() {
            return Err(Error::InvalidGeometry(format!("z offset must be finite, got {offset_z}")));
        }
        self.offset_z = offset_z;
        Ok(self)
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn spacing_x(&self) -> f64 {
        self.spacing_x
    }

    pub fn spacing_y(&self) -> f64 {
        self.spacing_y
    }

    pub fn offset_z(&self) -> f64 {
        self.offset_z
    }

    /// Element count `N = n_x · n_y`.
    pub fn len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_linear(&self) -> bool {
        self.n_y == 1
    }

    pub fn aperture_x(&self) -> f64 {
        self.n_x as f64 * self.spacing_x
    }

    pub fn aperture_y(&self) -> f64 {
        self.n_y as f64 * self.spacing_y
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_y + j
    }

    /// Grid coordinates `(i, j)` of flat index `idx`.
    pub fn grid(&self, idx: usize) -> (usize, usize) {
        (idx / self.n_y, idx % self.n_y)
    }

    pub fn coord_x(&self, i: usize) -> f64 {
        (i as f64 - 0.5 * (self.n_x as f64 - 1.0)) * self.spacing_x
    }

    pub fn coord_y(&self, j: usize) -> f64 {
        (j as f64 - 0.5 * (self.n_y as f64 - 1.0)) * self.spacing_y
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let (i, j) = self.grid(idx);
        [self.coord_x(i), self.coord_y(j), self.offset_z]
    }

    /// Propagating harmonics sampled by this aperture. An axis holding a
    /// single element senses no variation along it, so only the zero
    /// harmonic is kept there.
    pub fn lattice(&self) -> Result<WavenumberLattice> {
        let lx = if self.n_x == 1 { self.aperture_x().min(0.5) } else { self.aperture_x() };
        let ly = if self.n_y == 1 { self.aperture_y().min(0.5) } else { self.aperture_y() };
        WavenumberLattice::ellipse(lx, ly)
    }
}

/// `n_x x n_y @ Δ_x x Δ_y`, plus `, z=` when offset.
impl fmt::Display for ArrayGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}@{}x{}", self.n_x, self.n_y, self.spacing_x, self.spacing_y)?;
        if self.offset_z != 0.0 {
            write!(f, "+z{}", self.offset_z)?;
        }
        Ok(())
    }
}

/// Parses `n_x,n_y,spacing` or `n_x,n_y,spacing_x,spacing_y`.
impl FromStr for ArrayGeometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::InvalidGeometry(format!("cannot parse geometry `{s}` (expected n_x,n_y,spacing)"));
        if parts.len() < 3 || parts.len() > 4 {
            return Err(bad());
        }
        let n_x: usize = parts[0].parse().map_err(|_| bad())?;
        let n_y: usize = parts[1].parse().map_err(|_| bad())?;
        let sx = parse_spacing(parts[2]).ok_or_else(bad)?;
        let sy = match parts.get(3) {
            Some(p) => parse_spacing(p).ok_or_else(bad)?,
            None => sx,
        };
        ArrayGeometry::new(n_x, n_y, sx, sy)
    }
}

/// Accepts decimals and fractions such as `1/16`.
pub fn parse_spacing(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            Some(num / den)
        }
        None => s.trim().parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centred_positions() {
        let g = ArrayGeometry::upa(4, 3, 0.25).unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(g.position(0), [-0.375, -0.25, 0.0]);
        assert_eq!(g.position(g.index(3, 2)), [0.375, 0.25, 0.0]);
        assert_eq!(g.grid(7), (2, 1));
        assert_eq!(g.aperture_x(), 1.0);
        assert_eq!(g.aperture_y(), 0.75);
    }

    #[test]
    fn rejects_invalid_grids() {
        assert!(ArrayGeometry::new(0, 3, 0.5, 0.5).is_err());
        assert!(ArrayGeometry::new(2, 3, 0.0, 0.5).is_err());
        assert!(ArrayGeometry::new(2, 3, 0.5, f64::INFINITY).is_err());
        assert!(ArrayGeometry::single().with_offset_z(f64::NAN).is_err());
    }

    #[test]
    fn parse_and_display() {
        let g: ArrayGeometry = "256,1,1/16".parse().unwrap();
        assert_eq!(g, ArrayGeometry::ula(256, 0.0625).unwrap());
        assert_eq!(g.to_string(), "256x1@0.0625x0.0625");
        let g: ArrayGeometry = "4, 2, 0.5, 0.25".parse().unwrap();
        assert_eq!((g.spacing_x(), g.spacing_y()), (0.5, 0.25));
        assert!("4,2".parse::<ArrayGeometry>().is_err());
        assert!("a,2,0.5".parse::<ArrayGeometry>().is_err());
    }

    #[test]
    fn linear_arrays_get_a_single_lattice_row() {
        let g = ArrayGeometry::ula(32, 0.5).unwrap();
        let lat = g.lattice().unwrap();
        assert!(lat.points().iter().all(|&(_, y)| y == 0));
        assert_eq!(lat.len(), 33);
        let one = ArrayGeometry::single().lattice().unwrap();
        assert_eq!(one.points(), &[(0, 0)]);
    }
}
