use hmimo::channel::{correlated_batch, generate_planewave, ApertureResponse};
use hmimo::correlation::{clarke_correlation_matrix, eigen_subspace};
use hmimo::experiments::{max_abs_error, run_acf, AcfConfig, AcfGenerator};
use hmimo::{ArrayGeometry, IsotropicField, PlaneWaveModel, Retention};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn response_vectors_have_unit_norm(nx in 1usize..12, ny in 1usize..12, s in 0.05f64..0.8, z in -5.0f64..5.0) {
        let g = ArrayGeometry::upa(nx, ny, s).unwrap().with_offset_z(z).unwrap();
        for resp in [ApertureResponse::receive(&g).unwrap(), ApertureResponse::transmit(&g).unwrap()] {
            for &(a, b) in resp.lattice().points() {
                prop_assert!((resp.vector(a, b).unwrap().norm() - 1.0).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn variances_are_normalised(nx in 1usize..8, ny in 1usize..8, s in 0.1f64..1.0, tx_n in 1usize..6) {
        let rx = ArrayGeometry::upa(nx, ny, s).unwrap();
        let tx = ArrayGeometry::ula(tx_n, 0.5).unwrap();
        let m = PlaneWaveModel::build(&tx, &rx, IsotropicField::ThreeD).unwrap();
        let v = m.variances();
        prop_assert!((v.sum() - 1.0).abs() <= 1e-9);
        prop_assert!(v.iter().all(|&x| x >= 0.0));
    }
}

#[test]
fn entry_real_part_is_gaussian() {
    let g = ArrayGeometry::ula(16, 0.25).unwrap();
    let m = PlaneWaveModel::simo(&g, IsotropicField::ThreeD).unwrap();
    let draws = 100_000;
    let h = m.simo_batch(17, 0, draws).unwrap();
    let x: Vec<f64> = h.row(5).iter().map(|z| z.re).collect();
    let mean = x.iter().sum::<f64>() / draws as f64;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / draws as f64;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / draws as f64;
    let kurtosis = m4 / (m2 * m2);
    assert!((2.9..=3.1).contains(&kurtosis), "kurtosis {kurtosis}");
    assert!((m2 - 0.5).abs() < 0.01);
}

#[test]
fn mimo_energy_matches_expectation() {
    let tx = ArrayGeometry::upa(4, 4, 0.25).unwrap();
    let rx = ArrayGeometry::upa(6, 6, 0.25).unwrap().with_offset_z(20.0).unwrap();
    let m = PlaneWaveModel::build(&tx, &rx, IsotropicField::ThreeD).unwrap();
    let draws = 10_000;
    let mean = (0..draws).map(|k| generate_planewave(&m, 3, k).matrix.norm_squared()).sum::<f64>() / draws as f64;
    let expected = (rx.len() * tx.len()) as f64;
    assert!((mean / expected - 1.0).abs() < 0.03, "{mean} vs {expected}");
}

/// `E[H Hᴴ] = Σ σ² s sᴴ`; the depth phase has unit modulus and cancels.
fn receive_covariance(m: &PlaneWaveModel) -> DMatrix<Complex64> {
    let a = m.rx().dense();
    let w = m.receive_weights();
    let n = a.nrows() as f64;
    let scaled = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * w[j]);
    scaled * a.adjoint() * Complex64::new(n, 0.0)
}

#[test]
fn depth_offset_leaves_second_order_statistics_unchanged() {
    let flat = ArrayGeometry::upa(6, 5, 0.25).unwrap();
    let deep = flat.with_offset_z(7.3).unwrap();
    let a = PlaneWaveModel::simo(&flat, IsotropicField::ThreeD).unwrap();
    let b = PlaneWaveModel::simo(&deep, IsotropicField::ThreeD).unwrap();
    assert!((receive_covariance(&a) - receive_covariance(&b)).norm() < 1e-10);
    // individual draws do change
    assert!((a.realization(1, 0) - b.realization(1, 0)).norm() > 1e-3);
    // and the empirical covariances agree
    let draws = 20_000;
    let ha = a.simo_batch(2, 0, draws).unwrap();
    let hb = b.simo_batch(2, 0, draws).unwrap();
    let scale = Complex64::new(1.0 / draws as f64, 0.0);
    let ca = &ha * ha.adjoint() * scale;
    let cb = &hb * hb.adjoint() * scale;
    assert!(ca.iter().zip(cb.iter()).all(|(x, y)| (x - y).norm() < 0.05));
}

#[test]
fn correlated_generator_matches_bessel_acf() {
    let cfg = AcfConfig {
        geometry: ArrayGeometry::ula(64, 0.0625).unwrap(),
        field: IsotropicField::TwoD,
        generator: AcfGenerator::Toeplitz,
        realizations: 10_000,
        seed: 5,
        max_lag: 4.0,
    };
    let recs = run_acf(&cfg).unwrap();
    assert!(max_abs_error(&recs) <= 0.05);
}

#[test]
fn correlated_generator_reproduces_covariance() {
    let g = ArrayGeometry::ula(6, 0.3).unwrap();
    let r = clarke_correlation_matrix(&g, IsotropicField::TwoD, 1.0).unwrap();
    let s = eigen_subspace(&r, Retention::PowerFraction(1.0)).unwrap();
    let draws = 100_000;
    let h = correlated_batch(&s, 8, 0, draws);
    let cov = &h * h.adjoint() * Complex64::new(1.0 / draws as f64, 0.0);
    let target = r.to_complex();
    assert!(cov.iter().zip(target.iter()).all(|(x, y)| (x - y).norm() < 0.02));
}

#[test]
fn planewave_generation_is_reproducible() {
    let g = ArrayGeometry::upa(8, 8, 0.25).unwrap();
    let m = PlaneWaveModel::simo(&g, IsotropicField::ThreeD).unwrap();
    let a = generate_planewave(&m, 42, 7);
    let b = generate_planewave(&m, 42, 7);
    assert_eq!(a.matrix, b.matrix);
    assert_ne!(a.matrix, generate_planewave(&m, 42, 8).matrix);
}
