use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hmimo::experiments::AcfGenerator;
use hmimo::{ArrayGeometry, IsotropicField, Retention};

/// Holographic MIMO channel generation, correlation analysis and estimator
/// benchmarks.
#[derive(Debug, Parser)]
#[command(name = "hmimo", version, args_override_self = true)]
pub struct Cli {
    /// Worker threads for Monte Carlo loops (outputs do not depend on it).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,

    /// Key-value file of default flags; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical versus closed-form spatial ACF of generated channels.
    Acf(AcfArgs),
    /// NMSE-versus-SNR sweep of the LS, MMSE and RS-LS estimators.
    Nmse(NmseArgs),
    /// Eigenvalue profile and rank summary of an isotropic correlation.
    Spectrum(SpectrumArgs),
    /// Dump channel realizations for external tools.
    Gen(GenArgs),
    /// Scan eigenvalue-retention thresholds against reference NMSE gaps.
    Calibrate(CalibrateArgs),
}

pub fn parse_geometry(s: &str) -> Result<ArrayGeometry, String> {
    s.parse().map_err(|e: hmimo::Error| e.to_string())
}

pub fn parse_field(s: &str) -> Result<IsotropicField, String> {
    s.parse().map_err(|e: hmimo::Error| e.to_string())
}

pub fn parse_retention(s: &str) -> Result<Retention, String> {
    s.parse().map_err(|e: hmimo::Error| e.to_string())
}

fn parse_generator(s: &str) -> Result<AcfGenerator, String> {
    s.parse().map_err(|e: hmimo::Error| e.to_string())
}

fn parse_non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a non-negative number, got `{s}`")),
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct AcfArgs {
    /// Array as `n_x,n_y,spacing[,spacing_y]` in wavelengths (fractions allowed).
    #[arg(long, default_value = "256,1,1/16", value_parser = parse_geometry)]
    pub geometry: ArrayGeometry,

    /// Channel generator: `planewave` or `toeplitz` (R^{1/2} e).
    #[arg(long, default_value = "planewave", value_parser = parse_generator)]
    pub model: AcfGenerator,

    /// Isotropic field: `iso2d` (J0 ACF, linear arrays) or `iso3d` (sinc ACF).
    #[arg(long, default_value = "iso2d", value_parser = parse_field)]
    pub field: IsotropicField,

    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub realizations: u64,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Largest lag reported along each axis, in wavelengths.
    #[arg(long, default_value_t = 4.0, value_parser = parse_non_negative)]
    pub max_lag: f64,

    #[arg(long)]
    pub out: PathBuf,

    /// Also render `<out>.svg`.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingPreset {
    /// λ/4
    Quarter,
    /// λ/16
    Sixteenth,
    /// Keep the spacing given in `--geometry`.
    Custom,
}

#[derive(Debug, Clone, Args)]
pub struct NmseArgs {
    #[arg(long, default_value = "32,32,1/4", value_parser = parse_geometry)]
    pub geometry: ArrayGeometry,

    /// Overrides the spacing of `--geometry` with a preset.
    #[arg(long, value_enum, default_value_t = SpacingPreset::Custom)]
    pub spacing: SpacingPreset,

    #[arg(long, default_value = "iso3d", value_parser = parse_field)]
    pub field: IsotropicField,

    /// Comma-separated subset of `ls,mmse,rsls,rsls-iso`.
    #[arg(long, default_value = "ls,mmse,rsls,rsls-iso")]
    pub estimators: String,

    /// SNR grid in dB as `LO:STEP:HI` (inclusive) or a single value.
    #[arg(long, default_value = "-10:5:30", allow_hyphen_values = true)]
    pub snr: String,

    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    /// Fraction of rank(R_iso) kept in the truncated correlation.
    #[arg(long, default_value_t = 0.25, value_parser = parse_positive)]
    pub truncate_fraction: f64,

    /// Eigenvalue retention: `rel:EPS`, `power:P` or `rank:R`.
    #[arg(long, default_value = "rel:1e-5", value_parser = parse_retention)]
    pub retention: Retention,

    /// Keep the truncated eigenvalues unscaled instead of restoring tr = Nβ.
    #[arg(long)]
    pub no_renormalize: bool,

    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub beta: f64,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value = "32,32,1/4", value_parser = parse_geometry)]
    pub geometry: ArrayGeometry,

    #[arg(long, default_value = "iso3d", value_parser = parse_field)]
    pub field: IsotropicField,

    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub beta: f64,

    /// Additional retention policy to summarise.
    #[arg(long, value_parser = parse_retention)]
    pub retention: Option<Retention>,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpFormat {
    Csv,
    Bin,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Receive array.
    #[arg(long, visible_alias = "geometry", default_value = "64,1,1/4", value_parser = parse_geometry)]
    pub rx: ArrayGeometry,

    /// Transmit array; omitted for SIMO.
    #[arg(long, value_parser = parse_geometry)]
    pub tx: Option<ArrayGeometry>,

    #[arg(long, default_value = "planewave", value_parser = parse_generator)]
    pub model: AcfGenerator,

    #[arg(long, default_value = "iso3d", value_parser = parse_field)]
    pub field: IsotropicField,

    /// Receive-array offset r_z along the link axis, in wavelengths.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub link_distance: f64,

    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = DumpFormat::Csv)]
    pub format: DumpFormat,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    /// Side of the square array.
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(2..))]
    pub side: u64,

    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub snr: f64,

    #[arg(long, default_value_t = 0.25, value_parser = parse_positive)]
    pub truncate_fraction: f64,

    /// Comma-separated retention policies; defaults to a relative-threshold scan.
    #[arg(long)]
    pub policies: Option<String>,

    #[arg(long)]
    pub out: PathBuf,
}
