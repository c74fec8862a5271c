use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::correlation::ArrayGeometry;
use crate::linalg::cmul;
use crate::spectral::WavenumberLattice;
use crate::{Error, Result, KAPPA};

/// Plane-wave responses of one array over its propagating harmonics.
///
/// The response of harmonic `(n_x, n_y)` at element `(i, j)` factors into
/// `e^{±jκ x_i n_x/L_x} · e^{±jκ y_j n_y/L_y} · e^{±jκ z k_z}`, so only the two
/// axis tables and one depth phase per harmonic are stored. The sign is `+`
/// for receive and `−` for transmit responses.
#[derive(Debug, Clone)]
pub struct ApertureResponse {
    geometry: ArrayGeometry,
    lattice: WavenumberLattice,
    sign: f64,
    extent: (i32, i32),
    axis_x: DMatrix<Complex64>,
    axis_y: DMatrix<Complex64>,
    depth: Vec<Complex64>,
}

impl ApertureResponse {
    pub fn receive(geometry: &ArrayGeometry) -> Result<Self> {
        Self::new(geometry, geometry.lattice()?, 1.0)
    }

    pub fn transmit(geometry: &ArrayGeometry) -> Result<Self> {
        Self::new(geometry, geometry.lattice()?, -1.0)
    }

    pub(crate) fn new(geometry: &ArrayGeometry, lattice: WavenumberLattice, sign: f64) -> Result<Self> {
        let (mx, my) = lattice.extent();
        let (lx, ly) = (lattice.aperture_x(), lattice.aperture_y());
        let axis_x = DMatrix::from_fn(geometry.n_x(), (2 * mx + 1) as usize, |i, c| {
            let n = c as i32 - mx;
            Complex64::cis(sign * KAPPA * geometry.coord_x(i) * n as f64 / lx)
        });
        let axis_y = DMatrix::from_fn(geometry.n_y(), (2 * my + 1) as usize, |j, c| {
            let n = c as i32 - my;
            Complex64::cis(sign * KAPPA * geometry.coord_y(j) * n as f64 / ly)
        });
        let depth = lattice
            .points()
            .iter()
            .map(|&(nx, ny)| {
                let (u, v) = lattice.direction(nx, ny);
                let kz = (1.0 - u * u - v * v).max(0.0).sqrt();
                Complex64::cis(sign * KAPPA * geometry.offset_z() * kz)
            })
            .collect();
        Ok(ApertureResponse {
            geometry: *geometry,
            lattice,
            sign,
            extent: (mx, my),
            axis_x,
            axis_y,
            depth,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn lattice(&self) -> &WavenumberLattice {
        &self.lattice
    }

    pub fn is_receive(&self) -> bool {
        self.sign > 0.0
    }

    /// Unit-norm response of harmonic `(nx, ny)`.
    pub fn vector(&self, nx: i32, ny: i32) -> Result<DVector<Complex64>> {
        let p = self.lattice.index_of(nx, ny).ok_or(Error::Evanescent(nx, ny))?;
        let (mx, my) = self.extent;
        let g = &self.geometry;
        let scale = Complex64::new(1.0 / (g.len() as f64).sqrt(), 0.0) * self.depth[p];
        Ok(DVector::from_fn(g.len(), |idx, _| {
            let (i, j) = g.grid(idx);
            self.axis_x[(i, (nx + mx) as usize)] * self.axis_y[(j, (ny + my) as usize)] * scale
        }))
    }

    /// All unit-norm responses as columns, in lattice order.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let cols: Vec<DVector<Complex64>> = self
            .lattice
            .points()
            .iter()
            .map(|&(nx, ny)| self.vector(nx, ny).expect("lattice point"))
            .collect();
        DMatrix::from_columns(&cols)
    }

    /// `√N Σ_p c_p a_p` for every column of `coefficients` (`|lattice| × M`),
    /// returned as `N × M`.
    pub fn synthesize(&self, coefficients: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        if coefficients.nrows() != self.lattice.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lattice.len(),
                found: coefficients.nrows(),
            });
        }
        let m = coefficients.ncols();
        let (mx, my) = self.extent;
        let (kx, ky) = ((2 * mx + 1) as usize, (2 * my + 1) as usize);
        let (nx, ny) = (self.geometry.n_x(), self.geometry.n_y());

        // coefficient grids side by side: column block r holds realization r
        let mut grids = DMatrix::<Complex64>::zeros(kx, ky * m);
        for r in 0..m {
            for (p, &(px, py)) in self.lattice.points().iter().enumerate() {
                let c = coefficients[(p, r)] * self.depth[p];
                grids[((px + mx) as usize, r * ky + (py + my) as usize)] = c;
            }
        }
        let stage = cmul(&self.axis_x, &grids);
        // out_r[i, j] = Σ_c stage[i, r·ky + c] · axis_y[j, c]; laid out so the
        // product below is already the N × M result in (i·n_y + j) order
        let mut flipped = DMatrix::<Complex64>::zeros(ky, nx * m);
        for r in 0..m {
            for i in 0..nx {
                for c in 0..ky {
                    flipped[(c, r * nx + i)] = stage[(i, r * ky + c)];
                }
            }
        }
        let out = cmul(&self.axis_y, &flipped);
        Ok(DMatrix::from_vec(nx * ny, m, out.data.into()))
    }
}
