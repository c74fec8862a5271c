use std::f64::consts::{FRAC_PI_4, PI};

/// Arguments up to this magnitude use the power series; beyond it the
/// Hankel asymptotic expansion is already below 1e-10 in absolute error.
const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        j0_series(x)
    } else {
        j0_asymptotic(x)
    }
}

/// `Σ (-1)^k (x²/4)^k / (k!)²`. Terms peak near 4e3 at x = 12, which costs
/// about four digits to cancellation.
fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && kf > q.sqrt() {
            break;
        }
    }
    sum
}

/// `J₀(x) ≈ sqrt(2/(πx)) (P cos χ − Q sin χ)`, `χ = x − π/4`, with the
/// divergent P, Q series truncated at their smallest term.
fn j0_asymptotic(x: f64) -> f64 {
    let mut p = 1.0;
    let mut q = 0.0;
    // a_k = prod_{m=1..k} (2m-1)^2 / (k! 8^k x^k)
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..100 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= odd * odd / (8.0 * kf * x);
        if term >= prev || term < 1e-17 {
            break;
        }
        prev = term;
        // P = 1 − t₂ + t₄ − …, Q = −t₁ + t₃ − …
        match k % 4 {
            0 => p += term,
            1 => q -= term,
            2 => p -= term,
            _ => q += term,
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `J₀(x) = (1/π) ∫₀^π cos(x sin θ) dθ`. The integrand is periodic and
    /// analytic, so the trapezoidal rule converges geometrically once the
    /// node count exceeds x/2 by a margin.
    fn j0_trapezoid(x: f64) -> f64 {
        let m = (x.abs() as usize) + 64;
        let h = PI / m as f64;
        let mut sum = 0.5 * ((x * 0.0f64.sin()).cos() + (x * PI.sin()).cos());
        for i in 1..m {
            sum += (x * (i as f64 * h).sin()).cos();
        }
        sum * h / PI
    }

    #[test]
    fn matches_trapezoid_oracle_over_acf_range() {
        // d in [0, 64] wavelengths, x = 2πd
        let mut worst: f64 = 0.0;
        let steps = 40_000;
        for i in 0..=steps {
            let x = 2.0 * PI * 64.0 * i as f64 / steps as f64;
            let err = (bessel_j0(x) - j0_trapezoid(x)).abs();
            worst = worst.max(err);
        }
        assert!(worst < 1e-10, "worst abs error {worst:e}");
    }

    #[test]
    fn switchover_is_continuous() {
        let below = j0_series(SERIES_LIMIT);
        let above = j0_asymptotic(SERIES_LIMIT);
        assert!((below - above).abs() < 1e-10);
        assert!((below - j0_trapezoid(SERIES_LIMIT)).abs() < 1e-12);
    }

    #[test]
    fn known_values() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert!((bessel_j0(PI) - j0_trapezoid(PI)).abs() < 1e-14);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j0(-1.0) - bessel_j0(1.0)).abs() == 0.0);
    }

    #[test]
    fn first_zero_by_bisection() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if j0_trapezoid(lo) * j0_trapezoid(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        assert!((root - 2.404_825_557_695_773).abs() < 1e-12);
        // in wavelength units the first zero of the 2D ACF sits at root / 2π
        let d0 = root / (2.0 * PI);
        assert!((d0 - 0.382_739_874_781).abs() < 1e-9);
        assert!(super::super::bessel_acf(d0).abs() < 1e-12);
    }
}
