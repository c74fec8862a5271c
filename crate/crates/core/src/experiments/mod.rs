//! Seeded Monte Carlo harnesses: empirical ACFs of generated channels and
//! NMSE-versus-SNR sweeps of the estimators, plus the retention calibration
//! scan for the sweep's dB gaps.

mod acf;
mod calibration;
mod nmse;

pub use acf::{empirical_acf, max_abs_error, run_acf, ACFRecord, AcfConfig, AcfGenerator};
pub use calibration::{calibrate, default_policies, CalibrationReport, CalibrationRow, CalibrationTargets};
pub use nmse::{from_db, ratio_estimate, run_nmse_sweep, run_scenario, to_db, ExperimentConfig, NMSERecord, NmseScenario};
