use hmimo::correlation::{asymptotic_rank, clarke_correlation_matrix, eigen_subspace, truncated_correlation};
use hmimo::{ArrayGeometry, IsotropicField, Retention};
use proptest::prelude::*;

fn geometry() -> impl Strategy<Value = (ArrayGeometry, IsotropicField)> {
    prop_oneof![
        (1usize..40, 0.02f64..1.2).prop_map(|(n, s)| (ArrayGeometry::ula(n, s).unwrap(), IsotropicField::TwoD)),
        (1usize..8, 1usize..8, 0.02f64..1.0, 0.02f64..1.0)
            .prop_map(|(a, b, sx, sy)| (ArrayGeometry::new(a, b, sx, sy).unwrap(), IsotropicField::ThreeD)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clarke_matrices_are_valid_correlations((g, field) in geometry(), beta in 0.1f64..5.0) {
        let r = clarke_correlation_matrix(&g, field, beta).unwrap();
        let n = g.len();
        prop_assert!((r.trace() - n as f64 * beta).abs() <= 1e-9 * n as f64 * beta);
        let eig = r.eigen().unwrap();
        prop_assert!(eig.min_relative_eigenvalue() >= -1e-10);
        let sum: f64 = eig.values().iter().sum();
        prop_assert!((sum - n as f64 * beta).abs() <= 1e-8 * n as f64 * beta);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(r.get(i, j), r.get(j, i).conj());
            }
        }
    }

    #[test]
    fn subspaces_are_orthonormal_and_projectors_idempotent((g, field) in geometry(), eps in 1e-12f64..1e-2) {
        let r = clarke_correlation_matrix(&g, field, 1.0).unwrap();
        let s = eigen_subspace(&r, Retention::RelativeThreshold(eps)).unwrap();
        prop_assert!(s.orthonormality_error() <= 1e-10);
        let y = nalgebra::DMatrix::from_fn(g.len(), 3, |i, j| num_complex::Complex64::new((i as f64 + 0.3 * j as f64).sin(), (1.7 * i as f64).cos()));
        let once = s.project_columns(&y);
        let twice = s.project_columns(&once);
        prop_assert!((twice - &once).norm() <= 1e-12 * y.norm().max(1.0));
    }

    #[test]
    fn truncation_keeps_trace_and_psd((g, field) in geometry(), frac in 0.05f64..1.0) {
        let r = clarke_correlation_matrix(&g, field, 1.0).unwrap();
        let full = r.eigen().unwrap().numerical_rank();
        let keep = ((full as f64 * frac).ceil() as usize).clamp(1, full);
        let t = truncated_correlation(&r, keep, true).unwrap();
        prop_assert!((t.trace() - g.len() as f64).abs() <= 1e-9 * g.len() as f64);
        prop_assert!(t.eigen().unwrap().min_relative_eigenvalue() >= -1e-10);
    }
}

#[test]
fn quarter_wavelength_upa_rank_deficiency() {
    let g = ArrayGeometry::upa(32, 32, 0.25).unwrap();
    let asym = asymptotic_rank(&g);
    assert!((asym - 201.06).abs() < 0.01);
    let r = clarke_correlation_matrix(&g, IsotropicField::ThreeD, 1.0).unwrap();
    let eig = r.eigen().unwrap();
    let rank = eig.effective_rank(Retention::RelativeThreshold(1e-5)).unwrap();
    assert_eq!(rank, 359);
    assert!(asym < rank as f64 && rank < 1024);
    // the subspace of the retained eigenvectors contains the truncated channel subspace
    let iso = eig.subspace(Retention::default()).unwrap();
    let low = eig.truncate(90, true).unwrap();
    assert!(iso.containment_residual(&low.subspace) <= 1e-8);
    let rec = iso.reconstruct();
    let rel = (rec - r.to_complex()).norm() / r.to_complex().norm();
    assert!(rel < 1e-5);
}
