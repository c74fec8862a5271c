use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::channel::{correlated_batch, ChannelRealization, PlaneWaveModel};
use crate::correlation::{clarke_correlation_matrix, ArrayGeometry, Retention};
use crate::spectral::IsotropicField;
use crate::{Error, Result};

/// Realizations generated and accumulated per parallel work unit.
const CHUNK: usize = 128;

/// Empirical versus closed-form correlation at one lag (in wavelengths).
#[derive(Debug, Clone, PartialEq)]
pub struct ACFRecord {
    pub lag_x: f64,
    pub lag_y: f64,
    /// Real part of the lag-class average of `h_a h_b*`.
    pub empirical: f64,
    /// Imaginary residual of the same average; zero in expectation.
    pub imaginary: f64,
    pub closed_form: f64,
    pub realizations: usize,
}

impl ACFRecord {
    pub fn abs_error(&self) -> f64 {
        (self.empirical - self.closed_form).abs()
    }
}

/// Largest `abs_error` over a set of records.
pub fn max_abs_error(records: &[ACFRecord]) -> f64 {
    records.iter().map(ACFRecord::abs_error).fold(0.0, f64::max)
}

/// Accumulates `|FFT(h)|²` of zero-padded element grids; the inverse
/// transform of the sum is the sum of all linear autocorrelations.
struct PowerAccumulator {
    n_x: usize,
    n_y: usize,
    p_x: usize,
    p_y: usize,
    fft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    power: Vec<f64>,
    count: usize,
    buffer: Vec<Complex64>,
    column: Vec<Complex64>,
}

impl PowerAccumulator {
    fn new(geometry: &ArrayGeometry, planner: &mut FftPlanner<f64>) -> Self {
        let (n_x, n_y) = (geometry.n_x(), geometry.n_y());
        let (p_x, p_y) = (2 * n_x, if n_y == 1 { 1 } else { 2 * n_y });
        PowerAccumulator {
            n_x,
            n_y,
            p_x,
            p_y,
            fft_x: planner.plan_fft_forward(p_x),
            fft_y: planner.plan_fft_forward(p_y),
            power: vec![0.0; p_x * p_y],
            count: 0,
            buffer: vec![Complex64::default(); p_x * p_y],
            column: vec![Complex64::default(); p_x],
        }
    }

    /// `h` in element order `i·n_y + j`.
    fn add(&mut self, h: &[Complex64]) {
        let (n_x, n_y, p_x, p_y) = (self.n_x, self.n_y, self.p_x, self.p_y);
        // buffer row i (length p_y) holds element row i
        self.buffer.iter_mut().for_each(|z| *z = Complex64::default());
        for i in 0..n_x {
            self.buffer[i * p_y..i * p_y + n_y].copy_from_slice(&h[i * n_y..(i + 1) * n_y]);
        }
        if p_y > 1 {
            for i in 0..n_x {
                self.fft_y.process(&mut self.buffer[i * p_y..(i + 1) * p_y]);
            }
        }
        for c in 0..p_y {
            for i in 0..p_x {
                self.column[i] = self.buffer[i * p_y + c];
            }
            self.fft_x.process(&mut self.column);
            for i in 0..p_x {
                self.power[i * p_y + c] += self.column[i].norm_sqr();
            }
        }
        self.count += 1;
    }

    fn merge(&mut self, other: &PowerAccumulator) {
        for (a, b) in self.power.iter_mut().zip(&other.power) {
            *a += b;
        }
        self.count += other.count;
    }

    /// `Σ_realizations Σ_a h[a + d] h[a]*` for every signed lag `d`, indexed
    /// modulo the padded size.
    fn correlation_sums(&self, planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
        let (p_x, p_y) = (self.p_x, self.p_y);
        let inv_x = planner.plan_fft_inverse(p_x);
        let inv_y = planner.plan_fft_inverse(p_y);
        let mut grid: Vec<Complex64> = self.power.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        let mut column = vec![Complex64::default(); p_x];
        for c in 0..p_y {
            for i in 0..p_x {
                column[i] = grid[i * p_y + c];
            }
            inv_x.process(&mut column);
            for i in 0..p_x {
                grid[i * p_y + c] = column[i];
            }
        }
        if p_y > 1 {
            for i in 0..p_x {
                inv_y.process(&mut grid[i * p_y..(i + 1) * p_y]);
            }
        }
        let scale = 1.0 / (p_x * p_y) as f64;
        grid.iter().map(|z| z * scale).collect()
    }
}

/// Lag-class ACF estimate up to `max_lag` wavelengths along each axis.
///
/// For lag `(d_x, d_y)` with both components positive, the classes
/// `(d_x, d_y)` and `(d_x, −d_y)` share the same distance and are pooled.
fn records_from_sums(
    geometry: &ArrayGeometry,
    field: IsotropicField,
    sums: &[Complex64],
    p_y: usize,
    p_x: usize,
    realizations: usize,
    max_lag: f64,
) -> Vec<ACFRecord> {
    let (n_x, n_y) = (geometry.n_x(), geometry.n_y());
    let (sx, sy) = (geometry.spacing_x(), geometry.spacing_y());
    let at = |dx: isize, dy: isize| {
        let i = dx.rem_euclid(p_x as isize) as usize;
        let j = dy.rem_euclid(p_y as isize) as usize;
        sums[i * p_y + j]
    };
    let eps = 1e-9;
    let mut out = Vec::new();
    for dx in 0..n_x {
        if dx as f64 * sx > max_lag + eps {
            break;
        }
        for dy in 0..n_y {
            if dy as f64 * sy > max_lag + eps {
                break;
            }
            let pairs = ((n_x - dx) * (n_y - dy)) as f64;
            let (sum, count) = if dx > 0 && dy > 0 {
                (at(dx as isize, dy as isize) + at(dx as isize, -(dy as isize)), 2.0 * pairs)
            } else {
                (at(dx as isize, dy as isize), pairs)
            };
            let mean = sum / (count * realizations as f64);
            let (lx, ly) = (dx as f64 * sx, dy as f64 * sy);
            out.push(ACFRecord {
                lag_x: lx,
                lag_y: ly,
                empirical: mean.re,
                imaginary: mean.im,
                closed_form: field.acf((lx * lx + ly * ly).sqrt()),
                realizations,
            });
        }
    }
    out
}

/// Empirical ACF of a set of realizations sampled on `geometry`. MIMO
/// realizations contribute each of their columns.
pub fn empirical_acf(
    realizations: &[ChannelRealization],
    geometry: &ArrayGeometry,
    field: IsotropicField,
    max_lag: f64,
) -> Result<Vec<ACFRecord>> {
    if realizations.is_empty() {
        return Err(Error::InvalidArgument("no realizations supplied".into()));
    }
    let mut planner = FftPlanner::new();
    let mut acc = PowerAccumulator::new(geometry, &mut planner);
    for r in realizations {
        if r.rx_len() != geometry.len() {
            return Err(Error::DimensionMismatch {
                expected: geometry.len(),
                found: r.rx_len(),
            });
        }
        for col in r.matrix.column_iter() {
            let col: Vec<Complex64> = col.iter().copied().collect();
            acc.add(&col);
        }
    }
    let sums = acc.correlation_sums(&mut planner);
    Ok(records_from_sums(geometry, field, &sums, acc.p_y, acc.p_x, acc.count, max_lag))
}

/// How ACF-validation channels are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcfGenerator {
    PlaneWave,
    /// `h = R^{1/2} e` from the Clarke correlation of the array.
    Toeplitz,
}

impl std::str::FromStr for AcfGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "planewave" => Ok(AcfGenerator::PlaneWave),
            "toeplitz" => Ok(AcfGenerator::Toeplitz),
            _ => Err(Error::InvalidArgument(format!("unknown model `{s}` (expected planewave or toeplitz)"))),
        }
    }
}

impl std::fmt::Display for AcfGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AcfGenerator::PlaneWave => "planewave",
            AcfGenerator::Toeplitz => "toeplitz",
        })
    }
}

/// One ACF-validation run.
#[derive(Debug, Clone)]
pub struct AcfConfig {
    pub geometry: ArrayGeometry,
    pub field: IsotropicField,
    pub generator: AcfGenerator,
    pub realizations: usize,
    pub seed: u64,
    /// Largest lag reported along each axis, in wavelengths.
    pub max_lag: f64,
}

/// Generates `config.realizations` SIMO channels in fixed chunks (stream
/// `k` for realization `k`), accumulates their spectra in parallel and
/// returns the lag-class ACF. The result does not depend on the number of
/// worker threads.
pub fn run_acf(config: &AcfConfig) -> Result<Vec<ACFRecord>> {
    if config.realizations == 0 {
        return Err(Error::InvalidArgument("at least one realization is required".into()));
    }
    if config.max_lag.is_nan() || config.max_lag < 0.0 {
        return Err(Error::InvalidArgument(format!("max lag must be non-negative, got {}", config.max_lag)));
    }
    let g = &config.geometry;
    let draw: Box<dyn Fn(u64, usize) -> Result<DMatrix<Complex64>> + Sync> = match config.generator {
        AcfGenerator::PlaneWave => {
            let model = PlaneWaveModel::simo(g, config.field)?;
            let seed = config.seed;
            Box::new(move |first, count| model.simo_batch(seed, first, count))
        }
        AcfGenerator::Toeplitz => {
            let r = clarke_correlation_matrix(g, config.field, 1.0)?;
            let s = r.eigen()?.subspace(Retention::PowerFraction(1.0))?;
            let seed = config.seed;
            Box::new(move |first, count| Ok(correlated_batch(&s, seed, first, count)))
        }
    };
    let chunks = config.realizations.div_ceil(CHUNK);
    let partials: Vec<Result<PowerAccumulator>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let first = c * CHUNK;
            let count = CHUNK.min(config.realizations - first);
            let h = draw(first as u64, count)?;
            let mut planner = FftPlanner::new();
            let mut acc = PowerAccumulator::new(g, &mut planner);
            for col in h.column_iter() {
                acc.add(col.as_slice());
            }
            Ok(acc)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let mut total = PowerAccumulator::new(g, &mut planner);
    for p in partials {
        total.merge(&p?);
    }
    let sums = total.correlation_sums(&mut planner);
    Ok(records_from_sums(g, config.field, &sums, total.p_y, total.p_x, total.count, config.max_lag))
}
