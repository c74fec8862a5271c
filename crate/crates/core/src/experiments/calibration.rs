use rayon::prelude::*;

use super::nmse::{analytic_row, from_db, to_db, ExperimentConfig, NmseScenario};
use crate::correlation::{clarke_correlation_matrix, Retention};
use crate::Result;

/// Reference dB gaps the scan is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTargets {
    /// LS − MMSE at quarter-wavelength spacing.
    pub ls_mmse_quarter: f64,
    /// LS − conservative RS-LS at quarter-wavelength spacing.
    pub ls_iso_quarter: f64,
    /// LS − conservative RS-LS at one-sixteenth-wavelength spacing.
    pub ls_iso_sixteenth: f64,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        CalibrationTargets {
            ls_mmse_quarter: 8.5,
            ls_iso_quarter: 2.5,
            ls_iso_sixteenth: 9.0,
        }
    }
}

/// Analytic NMSE of one retention policy at one spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRow {
    pub retention: Retention,
    pub spacing: f64,
    pub rank_iso: usize,
    pub keep: usize,
    /// LS, MMSE, RS-LS and conservative RS-LS, in dB.
    pub nmse_db: [f64; 4],
}

impl CalibrationRow {
    pub fn ls_mmse_gap(&self) -> f64 {
        self.nmse_db[0] - self.nmse_db[1]
    }

    pub fn ls_iso_gap(&self) -> f64 {
        self.nmse_db[0] - self.nmse_db[3]
    }
}

/// Rows for every `(policy, spacing)` pair plus the best-matching policy.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub snr_db: f64,
    pub targets: CalibrationTargets,
    pub quarter: Vec<CalibrationRow>,
    pub sixteenth: Vec<CalibrationRow>,
}

impl CalibrationReport {
    /// Largest absolute deviation from the three targets for policy `i`.
    pub fn deviation(&self, i: usize) -> f64 {
        let (q, s) = (&self.quarter[i], &self.sixteenth[i]);
        [
            (q.ls_mmse_gap() - self.targets.ls_mmse_quarter).abs(),
            (q.ls_iso_gap() - self.targets.ls_iso_quarter).abs(),
            (s.ls_iso_gap() - self.targets.ls_iso_sixteenth).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Index of the policy with the smallest deviation.
    pub fn best(&self) -> usize {
        (0..self.quarter.len())
            .min_by(|&a, &b| self.deviation(a).total_cmp(&self.deviation(b)))
            .expect("at least one policy")
    }
}

/// Retention policies scanned by default, from loose to strict.
pub fn default_policies() -> Vec<Retention> {
    [1e-3, 1e-5, 1e-8, 1e-10, 1e-12, 1e-13, 1e-14]
        .into_iter()
        .map(Retention::RelativeThreshold)
        .collect()
}

/// Analytic gaps at `snr_db` for each policy on the square array of
/// `config` at spacings λ/4 and λ/16 (other fields of `config` are kept).
pub fn calibrate(config: &ExperimentConfig, policies: &[Retention], snr_db: f64) -> Result<CalibrationReport> {
    let gamma = from_db(snr_db);
    let scan = |spacing: f64| -> Result<Vec<CalibrationRow>> {
        let g = crate::ArrayGeometry::new(config.geometry.n_x(), config.geometry.n_y(), spacing, spacing)?;
        let eig = clarke_correlation_matrix(&g, config.field, config.beta)?.eigen()?;
        policies
            .par_iter()
            .map(|&retention| {
                let cfg = ExperimentConfig {
                    geometry: g,
                    retention,
                    ..config.clone()
                };
                let scenario = NmseScenario::from_eigen(&eig, &cfg)?;
                let row = analytic_row(&scenario, gamma)?;
                Ok(CalibrationRow {
                    retention,
                    spacing,
                    rank_iso: scenario.rank_iso,
                    keep: scenario.keep,
                    nmse_db: row.map(to_db),
                })
            })
            .collect()
    };
    Ok(CalibrationReport {
        snr_db,
        targets: CalibrationTargets::default(),
        quarter: scan(0.25)?,
        sixteenth: scan(0.0625)?,
    })
}
