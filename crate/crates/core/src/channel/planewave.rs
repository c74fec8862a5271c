use nalgebra::DMatrix;
use num_complex::Complex64;

use super::cscg;
use super::response::ApertureResponse;
use crate::correlation::ArrayGeometry;
use crate::spectral::patch::harmonic_masses;
use crate::spectral::IsotropicField;
use crate::{rng, Error, Result};

/// Fourier plane-wave series of an isotropic link.
///
/// `H = Σ_l Σ_n H_a(l, n) s_r(l) s_t(n)ᴴ` with `s = √N a` and independent
/// `H_a ~ CN(0, σ²)`. Under isotropic scattering the variances separate,
/// `σ²(l, n) = w_r(l) w_t(n)`, where each weight is the spectral mass of the
/// harmonic's wavenumber cell scaled so the weights of one side sum to one.
/// Hence `Σσ² = 1` and `E‖H‖²_F = N_r N_t`.
#[derive(Debug, Clone)]
pub struct PlaneWaveModel {
    field: IsotropicField,
    rx: ApertureResponse,
    tx: ApertureResponse,
    rx_weights: Vec<f64>,
    tx_weights: Vec<f64>,
    normalization: f64,
    tx_synthesis: DMatrix<Complex64>,
}

impl PlaneWaveModel {
    /// MIMO model between `tx` and `rx`.
    pub fn build(tx: &ArrayGeometry, rx: &ArrayGeometry, field: IsotropicField) -> Result<Self> {
        if field == IsotropicField::TwoD && !(tx.is_linear() && rx.is_linear()) {
            return Err(Error::InvalidGeometry(
                "the 2D isotropic model applies to linear arrays (n_y = 1) only".into(),
            ));
        }
        let rx_resp = ApertureResponse::receive(rx)?;
        let tx_resp = ApertureResponse::transmit(tx)?;
        let rx_mass = harmonic_masses(rx_resp.lattice(), field)?;
        let tx_mass = if tx.len() == 1 {
            vec![1.0]
        } else {
            harmonic_masses(tx_resp.lattice(), field)?
        };
        Self::from_masses(field, rx_resp, tx_resp, rx_mass, tx_mass)
    }

    /// SIMO model: a single transmit element and unit transmit factor.
    pub fn simo(rx: &ArrayGeometry, field: IsotropicField) -> Result<Self> {
        Self::build(&ArrayGeometry::single(), rx, field)
    }

    fn from_masses(
        field: IsotropicField,
        rx: ApertureResponse,
        tx: ApertureResponse,
        rx_mass: Vec<f64>,
        tx_mass: Vec<f64>,
    ) -> Result<Self> {
        let (sr, st): (f64, f64) = (rx_mass.iter().sum(), tx_mass.iter().sum());
        if !(sr > 0.0 && st > 0.0) || rx_mass.iter().chain(&tx_mass).any(|&m| m < 0.0 || !m.is_finite()) {
            return Err(Error::InvalidArgument("harmonic masses must be non-negative with positive total".into()));
        }
        let rx_weights = rx_mass.iter().map(|m| m / sr).collect();
        let tx_weights = tx_mass.iter().map(|m| m / st).collect();
        let nt = tx.geometry().len() as f64;
        let tx_synthesis = tx.dense().adjoint() * Complex64::new(nt.sqrt(), 0.0);
        Ok(PlaneWaveModel {
            field,
            rx,
            tx,
            rx_weights,
            tx_weights,
            normalization: 1.0 / (sr * st),
            tx_synthesis,
        })
    }

    pub fn field(&self) -> IsotropicField {
        self.field
    }

    pub fn rx(&self) -> &ApertureResponse {
        &self.rx
    }

    pub fn tx(&self) -> &ApertureResponse {
        &self.tx
    }

    pub fn rx_len(&self) -> usize {
        self.rx.geometry().len()
    }

    pub fn tx_len(&self) -> usize {
        self.tx.geometry().len()
    }

    pub fn is_simo(&self) -> bool {
        self.tx_len() == 1
    }

    /// Factor applied to the raw patch products so that `Σσ² = 1`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// `σ²` of every harmonic pair: rows follow the receive lattice, columns
    /// the transmit lattice.
    pub fn variances(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rx_weights.len(), self.tx_weights.len(), |l, n| {
            self.rx_weights[l] * self.tx_weights[n]
        })
    }

    /// `σ²` of the pair `(l_x, l_y)`, `(n_x, n_y)`; `None` off the lattices.
    pub fn variance(&self, lx: i32, ly: i32, nx: i32, ny: i32) -> Option<f64> {
        let l = self.rx.lattice().index_of(lx, ly)?;
        let n = self.tx.lattice().index_of(nx, ny)?;
        Some(self.rx_weights[l] * self.tx_weights[n])
    }

    pub fn receive_weights(&self) -> &[f64] {
        &self.rx_weights
    }

    /// One `N_r × N_t` draw from stream `(seed, stream)`.
    pub fn realization(&self, seed: u64, stream: u64) -> DMatrix<Complex64> {
        let mut rng = rng::stream(seed, stream);
        let (nr, nt) = (self.rx_weights.len(), self.tx_weights.len());
        let mut g = DMatrix::<Complex64>::zeros(nr, nt);
        for n in 0..nt {
            for l in 0..nr {
                let sd = (self.rx_weights[l] * self.tx_weights[n]).sqrt();
                g[(l, n)] = cscg(&mut rng) * sd;
            }
        }
        let partial = self.rx.synthesize(&g).expect("coefficient shape matches lattice");
        if self.is_simo() {
            // single transmit harmonic with unit response
            partial
        } else {
            crate::linalg::cmul(&partial, &self.tx_synthesis)
        }
    }

    /// `count` SIMO draws as columns of an `N_r × count` matrix; column `k`
    /// equals `realization(seed, first_stream + k)`.
    pub fn simo_batch(&self, seed: u64, first_stream: u64, count: usize) -> Result<DMatrix<Complex64>> {
        if !self.is_simo() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.tx_len(),
            });
        }
        let p = self.rx_weights.len();
        let sd: Vec<f64> = self.rx_weights.iter().map(|w| w.sqrt()).collect();
        let mut coeffs = DMatrix::<Complex64>::zeros(p, count);
        for (k, mut col) in coeffs.column_iter_mut().enumerate() {
            let mut rng = rng::stream(seed, first_stream + k as u64);
            for (z, s) in col.iter_mut().zip(&sd) {
                *z = cscg(&mut rng) * *s;
            }
        }
        self.rx.synthesize(&coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::WavenumberLattice;

    #[test]
    fn variances_sum_to_one() {
        let tx = ArrayGeometry::upa(6, 4, 0.5).unwrap();
        let rx = ArrayGeometry::upa(8, 8, 0.25).unwrap();
        let m = PlaneWaveModel::build(&tx, &rx, IsotropicField::ThreeD).unwrap();
        let v = m.variances();
        assert_eq!(v.nrows(), m.rx().lattice().len());
        assert_eq!(v.ncols(), m.tx().lattice().len());
        assert!((v.sum() - 1.0).abs() < 1e-9);
        assert!(v.iter().all(|&s| s >= 0.0));
        // isotropic masses over a full hemisphere: 1/2 on each side
        assert!((m.normalization() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn variances_are_point_symmetric() {
        let g = ArrayGeometry::upa(8, 6, 0.5).unwrap();
        let m = PlaneWaveModel::build(&g, &g, IsotropicField::ThreeD).unwrap();
        for &(lx, ly) in m.rx().lattice().points() {
            for &(nx, ny) in m.tx().lattice().points() {
                let a = m.variance(lx, ly, nx, ny).unwrap();
                assert!((a - m.variance(-lx, -ly, nx, ny).unwrap()).abs() < 1e-12);
                assert!((a - m.variance(lx, ly, -nx, -ny).unwrap()).abs() < 1e-12);
            }
        }
        assert_eq!(m.variance(99, 0, 0, 0), None);
    }

    #[test]
    fn single_harmonic_lattices() {
        // apertures of 0.4 wavelengths hold only the broadside harmonic
        let g = ArrayGeometry::ula(2, 0.2).unwrap();
        assert_eq!(g.lattice().unwrap().points(), WavenumberLattice::ellipse(0.4, 0.4).unwrap().points());
        let m = PlaneWaveModel::build(&g, &g, IsotropicField::ThreeD).unwrap();
        assert_eq!(m.variances(), DMatrix::from_element(1, 1, 1.0));
    }

    #[test]
    fn two_d_field_requires_linear_arrays() {
        let upa = ArrayGeometry::upa(4, 4, 0.25).unwrap();
        assert!(PlaneWaveModel::simo(&upa, IsotropicField::TwoD).is_err());
        let ula = ArrayGeometry::ula(64, 0.25).unwrap();
        let m = PlaneWaveModel::simo(&ula, IsotropicField::TwoD).unwrap();
        assert!((m.receive_weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variances_give_zero_channel() {
        let g = ArrayGeometry::ula(8, 0.25).unwrap();
        let mut m = PlaneWaveModel::simo(&g, IsotropicField::TwoD).unwrap();
        m.rx_weights.iter_mut().for_each(|w| *w = 0.0);
        assert_eq!(m.realization(1, 0), DMatrix::zeros(8, 1));
    }

    #[test]
    fn mimo_matches_explicit_double_sum() {
        let tx = ArrayGeometry::ula(3, 0.5).unwrap();
        let rx = ArrayGeometry::upa(3, 2, 0.5).unwrap().with_offset_z(1.5).unwrap();
        let m = PlaneWaveModel::build(&tx, &rx, IsotropicField::ThreeD).unwrap();
        let h = m.realization(9, 3);

        let mut rng = rng::stream(9, 3);
        let (ar, at) = (m.rx().dense(), m.tx().dense());
        let (er, et) = (ar.ncols(), at.ncols());
        let mut g = DMatrix::<Complex64>::zeros(er, et);
        for n in 0..et {
            for l in 0..er {
                g[(l, n)] = cscg(&mut rng) * m.variances()[(l, n)].sqrt();
            }
        }
        let scale = Complex64::new((rx.len() * tx.len()) as f64, 0.0).sqrt();
        let expected = &ar * g * at.adjoint() * scale;
        assert!((h - expected).norm() < 1e-12);
    }

    #[test]
    fn batch_columns_match_single_draws() {
        let g = ArrayGeometry::upa(5, 4, 0.25).unwrap();
        let m = PlaneWaveModel::simo(&g, IsotropicField::ThreeD).unwrap();
        let b = m.simo_batch(2, 10, 4).unwrap();
        for k in 0..4 {
            let single = m.realization(2, 10 + k as u64);
            assert!((b.column(k) - single.column(0)).norm() < 1e-12);
        }
        let mimo = PlaneWaveModel::build(&g, &g, IsotropicField::ThreeD).unwrap();
        assert!(mimo.simo_batch(0, 0, 1).is_err());
    }
}
