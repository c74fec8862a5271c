use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::cscg;
use crate::correlation::{clarke_correlation_matrix, ArrayGeometry, CorrelationMatrix, EigenDecomposition, Retention, Subspace};
use crate::estimation::{leakage, EstimatorKind, MmseFilter};
use crate::linalg::{join, split};
use crate::spectral::IsotropicField;
use crate::{rng, Error, Result};

/// Trials drawn and evaluated per parallel work unit.
const CHUNK: usize = 50;

/// Configuration of an NMSE-versus-SNR sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: ArrayGeometry,
    pub field: IsotropicField,
    pub estimators: Vec<EstimatorKind>,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    /// Retention policy of the isotropic subspace (`rank_iso` and the
    /// conservative RS-LS projector).
    pub retention: Retention,
    /// Fraction of `rank_iso` kept when truncating `R_iso`.
    pub truncate_fraction: f64,
    pub renormalize: bool,
    pub beta: f64,
}

impl ExperimentConfig {
    /// 32×32 UPA at `spacing`, all four estimators, SNR −10:5:30 dB.
    pub fn upa_sweep(spacing: f64) -> Result<Self> {
        Ok(ExperimentConfig {
            geometry: ArrayGeometry::upa(32, 32, spacing)?,
            field: IsotropicField::ThreeD,
            estimators: EstimatorKind::ALL.to_vec(),
            snr_grid_db: (0..9).map(|k| -10.0 + 5.0 * k as f64).collect(),
            trials: 1000,
            master_seed: 1,
            retention: Retention::default(),
            truncate_fraction: 0.25,
            renormalize: true,
            beta: 1.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidArgument("SNR grid is empty".into()));
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) || self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("SNR grid must be finite and strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("at least one trial is required".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidArgument("no estimators selected".into()));
        }
        if !(self.truncate_fraction > 0.0 && self.truncate_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "truncate fraction must lie in (0, 1], got {}",
                self.truncate_fraction
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("average gain must be positive, got {}", self.beta)));
        }
        self.retention.validate()
    }
}

/// Empirical and analytic NMSE of one estimator at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct NMSERecord {
    pub estimator: EstimatorKind,
    pub snr_db: f64,
    pub empirical_nmse: f64,
    pub analytic_nmse: Option<f64>,
    pub trials: usize,
    pub stderr: f64,
}

/// Statistics shared by every trial of a sweep.
#[derive(Debug, Clone)]
pub struct NmseScenario {
    /// Channel correlation the trials are drawn from.
    pub r_true: CorrelationMatrix,
    /// Exact eigen-subspace of `r_true`.
    pub true_subspace: Subspace,
    /// Subspace of `R_iso` under the retention policy.
    pub iso_subspace: Subspace,
    pub rank_iso: usize,
    pub keep: usize,
}

impl NmseScenario {
    /// Clarke `R_iso` of the configured array, truncated to its largest
    /// `round(fraction · rank_iso)` eigenpairs.
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let r_iso = clarke_correlation_matrix(&config.geometry, config.field, config.beta)?;
        Self::from_eigen(&r_iso.eigen()?, config)
    }

    pub fn from_eigen(eig: &EigenDecomposition, config: &ExperimentConfig) -> Result<Self> {
        let iso_subspace = eig.subspace(config.retention)?;
        let rank_iso = iso_subspace.rank();
        let keep = ((rank_iso as f64 * config.truncate_fraction).round() as usize).max(1);
        let low = eig.truncate(keep, config.renormalize)?;
        Ok(NmseScenario {
            r_true: low.matrix,
            true_subspace: low.subspace,
            iso_subspace,
            rank_iso,
            keep,
        })
    }

    fn subspace(&self, kind: EstimatorKind) -> Option<&Subspace> {
        match kind {
            EstimatorKind::RsLs => Some(&self.true_subspace),
            EstimatorKind::RsLsConservative => Some(&self.iso_subspace),
            _ => None,
        }
    }
}

/// `10 log₁₀ x`.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Runs the sweep described by `config`.
pub fn run_nmse_sweep(config: &ExperimentConfig) -> Result<Vec<NMSERecord>> {
    let scenario = NmseScenario::build(config)?;
    run_scenario(&scenario, config)
}

/// Monte Carlo sweep over a prepared scenario.
///
/// Trial `t` draws `e ~ CN(0, I_k)` and then `n ~ CN(0, I_N)` from stream
/// `(master_seed, t)`; the channel is `h = U Λ^{1/2} e` and the same `h`
/// and `n` serve every SNR and estimator. Trials run in fixed chunks whose
/// partial results are concatenated in trial order, so records do not
/// depend on the worker count.
pub fn run_scenario(scenario: &NmseScenario, config: &ExperimentConfig) -> Result<Vec<NMSERecord>> {
    config.validate()?;
    let n = scenario.r_true.dim();
    if n != config.geometry.len() {
        return Err(Error::DimensionMismatch {
            expected: config.geometry.len(),
            found: n,
        });
    }
    let gammas: Vec<f64> = config.snr_grid_db.iter().map(|&s| from_db(s)).collect();
    let filters: Vec<Option<MmseFilter>> = if config.estimators.contains(&EstimatorKind::Mmse) {
        gammas.iter().map(|&g| MmseFilter::new(&scenario.r_true, g).map(Some)).collect::<Result<_>>()?
    } else {
        vec![None; gammas.len()]
    };
    let colouring = scenario.true_subspace.colouring();
    let k = scenario.true_subspace.rank();
    let cells = config.estimators.len() * gammas.len();

    let chunks = config.trials.div_ceil(CHUNK);
    // per chunk: for each (estimator, snr) cell, the per-trial errors; plus per-trial ‖h‖²
    let partials: Vec<(Vec<Vec<f64>>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let first = c * CHUNK;
            let m = CHUNK.min(config.trials - first);
            let mut e = DMatrix::<Complex64>::zeros(k, m);
            let mut noise = DMatrix::<Complex64>::zeros(n, m);
            for t in 0..m {
                let mut rng = rng::stream(config.master_seed, (first + t) as u64);
                for z in e.column_mut(t).iter_mut() {
                    *z = cscg(&mut rng);
                }
                for z in noise.column_mut(t).iter_mut() {
                    *z = cscg(&mut rng);
                }
            }
            let h = colouring.mul(&e);
            let (h_re, h_im) = split(&h);
            let (n_re, n_im) = split(&noise);
            let power: Vec<f64> = h.column_iter().map(|c| c.norm_squared()).collect();
            let mut errors = vec![Vec::with_capacity(m); cells];
            for (si, &gamma) in gammas.iter().enumerate() {
                let s = gamma.sqrt();
                let y = join(&(&h_re * s + &n_re), &(&h_im * s + &n_im));
                for (ei, &kind) in config.estimators.iter().enumerate() {
                    let est = match kind {
                        EstimatorKind::Ls => &y / Complex64::new(s, 0.0),
                        EstimatorKind::Mmse => filters[si].as_ref().expect("built above").apply(&y),
                        EstimatorKind::RsLs | EstimatorKind::RsLsConservative => {
                            scenario.subspace(kind).expect("subspace estimator").project_columns(&y) / Complex64::new(s, 0.0)
                        }
                    };
                    let cell = &mut errors[ei * gammas.len() + si];
                    for t in 0..m {
                        cell.push((est.column(t) - h.column(t)).norm_squared());
                    }
                }
            }
            (errors, power)
        })
        .collect();

    let mut errors = vec![Vec::with_capacity(config.trials); cells];
    let mut power = Vec::with_capacity(config.trials);
    for (errs, pw) in partials {
        for (dst, src) in errors.iter_mut().zip(errs) {
            dst.extend(src);
        }
        power.extend(pw);
    }

    let trace = scenario.r_true.trace();
    let mut records = Vec::with_capacity(cells);
    for (ei, &kind) in config.estimators.iter().enumerate() {
        for (si, &gamma) in gammas.iter().enumerate() {
            let (nmse, stderr) = ratio_estimate(&errors[ei * gammas.len() + si], &power);
            let analytic = match kind {
                EstimatorKind::Ls => n as f64 / gamma / trace,
                EstimatorKind::Mmse => filters[si].as_ref().expect("built above").matched_error_power(&scenario.r_true)? / trace,
                EstimatorKind::RsLs | EstimatorKind::RsLsConservative => {
                    let s = scenario.subspace(kind).expect("subspace estimator");
                    (s.rank() as f64 / gamma + leakage(s, &scenario.r_true)) / trace
                }
            };
            records.push(NMSERecord {
                estimator: kind,
                snr_db: config.snr_grid_db[si],
                empirical_nmse: nmse,
                analytic_nmse: Some(analytic),
                trials: config.trials,
                stderr,
            });
        }
    }
    Ok(records)
}

/// `Σe / Σg` and its delta-method standard error
/// `sqrt(Σ(e_t − ρ g_t)² / (T(T − 1))) / ḡ`.
pub fn ratio_estimate(errors: &[f64], power: &[f64]) -> (f64, f64) {
    let t = errors.len() as f64;
    let se: f64 = errors.iter().sum();
    let sg: f64 = power.iter().sum();
    let rho = se / sg;
    if errors.len() < 2 {
        return (rho, 0.0);
    }
    let ss: f64 = errors.iter().zip(power).map(|(e, g)| (e - rho * g).powi(2)).sum();
    let stderr = (ss / (t * (t - 1.0))).sqrt() / (sg / t);
    (rho, stderr)
}

/// Analytic NMSE of LS, MMSE, RS-LS and conservative RS-LS at one SNR.
pub(crate) fn analytic_row(scenario: &NmseScenario, gamma: f64) -> Result<[f64; 4]> {
    let trace = scenario.r_true.trace();
    let n = scenario.r_true.dim() as f64;
    let mmse = MmseFilter::new(&scenario.r_true, gamma)?.matched_error_power(&scenario.r_true)? / trace;
    let rs = |s: &Subspace| (s.rank() as f64 / gamma + leakage(s, &scenario.r_true)) / trace;
    Ok([n / gamma / trace, mmse, rs(&scenario.true_subspace), rs(&scenario.iso_subspace)])
}
