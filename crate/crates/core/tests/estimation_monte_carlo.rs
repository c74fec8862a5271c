use hmimo::channel::{generate_correlated, ChannelRealization, ModelTag};
use hmimo::correlation::{clarke_correlation_matrix, eigen_subspace};
use hmimo::estimation::{analytic_nmse, ls_estimate, observe_pilot, rs_ls_estimate, EstimatorSpec};
use hmimo::{rng, ArrayGeometry, IsotropicField, Retention};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn small_scenario() -> (hmimo::CorrelationMatrix, hmimo::Subspace) {
    let g = ArrayGeometry::upa(4, 4, 0.25).unwrap();
    let r = clarke_correlation_matrix(&g, IsotropicField::ThreeD, 1.0).unwrap();
    let s = eigen_subspace(&r, Retention::PowerFraction(1.0)).unwrap();
    (r, s)
}

#[test]
fn ls_nmse_at_ten_db() {
    let (r, s) = small_scenario();
    let gamma = 10.0;
    let (mut err, mut pow) = (0.0, 0.0);
    for t in 0..20_000 {
        let h = generate_correlated(&s, 1, t);
        let obs = observe_pilot(&h, gamma, &mut rng::stream(2, t)).unwrap();
        let hv = h.simo().unwrap();
        err += (ls_estimate(&obs) - &hv).norm_squared();
        pow += hv.norm_squared();
    }
    let nmse = err / pow;
    assert!((nmse / 0.1 - 1.0).abs() < 0.02, "{nmse}");
    assert!((analytic_nmse(&EstimatorSpec::ls(), gamma, &r).unwrap() - 0.1).abs() < 1e-12);
}

#[test]
fn mmse_monte_carlo_matches_analytic() {
    let (r, s) = small_scenario();
    let gamma = 2.0;
    let spec = EstimatorSpec::mmse(r.clone());
    let (mut err, mut pow) = (0.0, 0.0);
    for t in 0..100_000 {
        let h = generate_correlated(&s, 3, t);
        let obs = observe_pilot(&h, gamma, &mut rng::stream(4, t)).unwrap();
        let hv = h.simo().unwrap();
        err += (spec.estimate(&obs).unwrap() - &hv).norm_squared();
        pow += hv.norm_squared();
    }
    let analytic = analytic_nmse(&spec, gamma, &r).unwrap();
    assert!((err / pow / analytic - 1.0).abs() < 0.02, "{} vs {analytic}", err / pow);
}

#[test]
fn rs_ls_is_unbiased_on_its_subspace() {
    let (r, _) = small_scenario();
    let s = eigen_subspace(&r, Retention::RelativeThreshold(1e-2)).unwrap();
    // a fixed channel inside span(U)
    let coeffs = DMatrix::from_fn(s.rank(), 1, |i, _| Complex64::new(1.0 / (1.0 + i as f64), 0.5));
    let h = s.basis().mul(&coeffs);
    let real = ChannelRealization::new(h.clone(), 0, 0, ModelTag::Correlated).unwrap();
    let hv: DVector<Complex64> = h.column(0).into_owned();
    let trials = 20_000;
    let gamma = 1.0;
    let mut mean = DVector::<Complex64>::zeros(16);
    let mut sq = 0.0;
    for t in 0..trials {
        let obs = observe_pilot(&real, gamma, &mut rng::stream(6, t)).unwrap();
        let est = rs_ls_estimate(&obs, &s).unwrap();
        sq += (&est - &hv).norm_squared();
        mean += est;
    }
    mean /= Complex64::new(trials as f64, 0.0);
    // per-entry standard error of the mean: sqrt(E|ĥ_i − h_i|² / T)
    let se = (sq / 16.0 / trials as f64).sqrt();
    for (m, x) in mean.iter().zip(hv.iter()) {
        assert!((m - x).norm() <= 3.0 * se * 1.5, "{} > {}", (m - x).norm(), 3.0 * se);
    }
}
