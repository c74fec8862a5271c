//! Channel realizations: the correlated-Gaussian route `h = U Λ^{1/2} e`
//! and the Fourier plane-wave series over transmit and receive lattices.

mod planewave;
mod response;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub use planewave::PlaneWaveModel;
pub use response::ApertureResponse;

use crate::correlation::Subspace;
use crate::spectral::IsotropicField;
use crate::{rng, Error, Result};

/// Which generator produced a realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    /// `h = U Λ^{1/2} e` from a correlation eigen-subspace.
    Correlated,
    PlaneWave(IsotropicField),
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelTag::Correlated => f.write_str("correlated"),
            ModelTag::PlaneWave(field) => write!(f, "planewave-{}", field.tag()),
        }
    }
}

impl FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "correlated" => Ok(ModelTag::Correlated),
            _ => match s.strip_prefix("planewave-") {
                Some(field) => Ok(ModelTag::PlaneWave(field.parse()?)),
                None => Err(Error::InvalidArgument(format!("unknown model tag `{s}`"))),
            },
        }
    }
}

/// One `N_r × N_t` channel draw (`N_t = 1` for SIMO) and its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub matrix: DMatrix<Complex64>,
    pub seed: u64,
    pub stream: u64,
    pub model_tag: ModelTag,
}

impl ChannelRealization {
    /// Errors on non-finite entries.
    pub fn new(matrix: DMatrix<Complex64>, seed: u64, stream: u64, model_tag: ModelTag) -> Result<Self> {
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("channel realization has non-finite entries".into()));
        }
        Ok(ChannelRealization {
            matrix,
            seed,
            stream,
            model_tag,
        })
    }

    pub fn rx_len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn tx_len(&self) -> usize {
        self.matrix.ncols()
    }

    /// The single column of a SIMO realization.
    pub fn simo(&self) -> Result<DVector<Complex64>> {
        if self.tx_len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.tx_len(),
            });
        }
        Ok(self.matrix.column(0).into_owned())
    }
}

/// One `CN(0, 1)` draw: independent real and imaginary parts of variance ½.
pub fn cscg<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `dim` i.i.d. `CN(0, 1)` entries.
pub fn sample_cscg<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    DVector::from_fn(dim, |_, _| cscg(rng))
}

/// `count` correlated SIMO draws as columns; column `k` uses the random
/// stream `(seed, first_stream + k)`.
pub fn correlated_batch(subspace: &Subspace, seed: u64, first_stream: u64, count: usize) -> DMatrix<Complex64> {
    let r = subspace.rank();
    if r == 0 {
        return DMatrix::zeros(subspace.dim(), count);
    }
    let mut e = DMatrix::<Complex64>::zeros(r, count);
    for (k, mut col) in e.column_iter_mut().enumerate() {
        let mut rng = rng::stream(seed, first_stream + k as u64);
        for z in col.iter_mut() {
            *z = cscg(&mut rng);
        }
    }
    subspace.colouring().mul(&e)
}

/// `h = U Λ^{1/2} e` with `e ~ CN(0, I_r)` drawn from stream `(seed, stream)`.
pub fn generate_correlated(subspace: &Subspace, seed: u64, stream: u64) -> ChannelRealization {
    let h = correlated_batch(subspace, seed, stream, 1);
    ChannelRealization {
        matrix: h,
        seed,
        stream,
        model_tag: ModelTag::Correlated,
    }
}

/// One plane-wave draw from stream `(seed, stream)`.
pub fn generate_planewave(model: &PlaneWaveModel, seed: u64, stream: u64) -> ChannelRealization {
    ChannelRealization {
        matrix: model.realization(seed, stream),
        seed,
        stream,
        model_tag: ModelTag::PlaneWave(model.field()),
    }
}
