//! Spatial correlation matrices of uniform arrays under isotropic scattering,
//! their eigen-subspaces and truncated low-rank variants.

mod geometry;
mod subspace;

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub use geometry::{parse_spacing, ArrayGeometry};
pub use subspace::{Retention, Subspace};

use crate::linalg::CMatrix;
use crate::spectral::IsotropicField;
use crate::{Error, Result};

use subspace::rounding_floor;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-9;

/// Hermitian positive-semidefinite spatial correlation with `tr(R) = Nβ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: CMatrix,
    beta: f64,
}

impl CorrelationMatrix {
    /// Validates squareness, Hermitian symmetry and the trace normalisation.
    pub fn new(entries: DMatrix<Complex64>, beta: f64) -> Result<Self> {
        Self::from_cmatrix(CMatrix::from_complex(entries), beta)
    }

    pub(crate) fn from_cmatrix(entries: CMatrix, beta: f64) -> Result<Self> {
        let n = entries.nrows();
        if n != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.ncols(),
            });
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("average gain must be positive, got {beta}")));
        }
        let scale = entries.frobenius_norm().max(f64::MIN_POSITIVE);
        let mut asym: f64 = 0.0;
        let mut trace = 0.0;
        for i in 0..n {
            trace += entries.get(i, i).re;
            for j in 0..i {
                asym = asym.max((entries.get(i, j) - entries.get(j, i).conj()).norm());
            }
            asym = asym.max(entries.get(i, i).im.abs());
        }
        if asym > HERMITIAN_TOL * scale {
            return Err(Error::InvalidArgument(format!("matrix is not Hermitian (deviation {asym:e})")));
        }
        let target = n as f64 * beta;
        if (trace - target).abs() > TRACE_TOL * target {
            return Err(Error::InvalidArgument(format!(
                "trace {trace} differs from N·β = {target}"
            )));
        }
        Ok(CorrelationMatrix { entries, beta })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.entries.to_complex()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries.get(i, j)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries.get(i, i).re).sum()
    }

    /// Full eigendecomposition, eigenvalues in descending order.
    pub fn eigen(&self) -> Result<EigenDecomposition> {
        let n = self.dim();
        let max_iter = 1000 * n.max(1);
        let (values, vectors) = match &self.entries {
            CMatrix::Real(m) => {
                let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, max_iter)
                    .ok_or_else(|| Error::Eigen(format!("symmetric QR iteration did not converge for n = {n}")))?;
                let order = descending_order(eig.eigenvalues.as_slice());
                let values = order.iter().map(|&k| eig.eigenvalues[k]).collect::<Vec<_>>();
                let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
                (values, CMatrix::Real(vectors))
            }
            CMatrix::Complex(m) => {
                let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, max_iter)
                    .ok_or_else(|| Error::Eigen(format!("Hermitian QR iteration did not converge for n = {n}")))?;
                let order = descending_order(eig.eigenvalues.as_slice());
                let values = order.iter().map(|&k| eig.eigenvalues[k]).collect::<Vec<_>>();
                let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
                (values, CMatrix::Complex(vectors))
            }
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Eigen("non-finite eigenvalue".into()));
        }
        Ok(EigenDecomposition {
            values,
            vectors,
            beta: self.beta,
        })
    }
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Eigenpairs of a correlation matrix, descending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: CMatrix,
    beta: f64,
}

impl EigenDecomposition {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Number of eigenpairs `retention` keeps.
    pub fn effective_rank(&self, retention: Retention) -> Result<usize> {
        retention.count(&self.values)
    }

    /// Eigenvalues above the rounding floor of the eigensolve.
    pub fn numerical_rank(&self) -> usize {
        let lmax = self.values.first().copied().unwrap_or(0.0);
        let floor = rounding_floor(self.dim(), lmax);
        self.values.iter().take_while(|&&l| l > floor && l > 0.0).count()
    }

    /// Smallest eigenvalue relative to the largest; PSD-ness requires this
    /// to be ≥ −1e-10.
    pub fn min_relative_eigenvalue(&self) -> f64 {
        let lmax = self.values.first().copied().unwrap_or(0.0);
        let lmin = self.values.last().copied().unwrap_or(0.0);
        if lmax <= 0.0 {
            return lmin;
        }
        lmin / lmax
    }

    /// The leading `k` eigenpairs as a subspace.
    pub fn leading(&self, k: usize) -> Subspace {
        let k = k.min(self.dim());
        let basis = match &self.vectors {
            CMatrix::Real(v) => CMatrix::Real(v.columns(0, k).into_owned()),
            CMatrix::Complex(v) => CMatrix::Complex(v.columns(0, k).into_owned()),
        };
        Subspace::from_parts(basis, self.values[..k].to_vec())
    }

    /// Signal subspace under `retention`.
    pub fn subspace(&self, retention: Retention) -> Result<Subspace> {
        Ok(self.leading(self.effective_rank(retention)?))
    }

    /// Correlation rebuilt from the `keep` largest eigenpairs, optionally
    /// rescaled to `tr = Nβ`. Without rescaling `β` becomes `tr/N`.
    pub fn truncate(&self, keep: usize, renormalize: bool) -> Result<LowRankCorrelation> {
        let available = self.numerical_rank();
        if keep == 0 || keep > available {
            return Err(Error::InvalidArgument(format!(
                "cannot keep {keep} eigenpairs: {available} are above the rounding floor"
            )));
        }
        let n = self.dim();
        let kept_power: f64 = self.values[..keep].iter().sum();
        let (scale, beta) = if renormalize {
            (n as f64 * self.beta / kept_power, self.beta)
        } else {
            (1.0, kept_power / n as f64)
        };
        let leading = self.leading(keep);
        let values: Vec<f64> = leading.eigenvalues().iter().map(|l| l * scale).collect();
        let subspace = Subspace::from_parts(leading.basis().clone(), values);
        let rebuilt = subspace.basis().scale_columns(subspace.eigenvalues()).mul_adjoint(subspace.basis());
        let matrix = CorrelationMatrix::from_cmatrix(symmetrize(rebuilt), beta)?;
        Ok(LowRankCorrelation { matrix, subspace })
    }
}

/// Averages `A` with `Aᴴ` to remove GEMM rounding asymmetry.
fn symmetrize(m: CMatrix) -> CMatrix {
    match m {
        CMatrix::Real(a) => CMatrix::Real((&a + a.transpose()) * 0.5),
        CMatrix::Complex(a) => CMatrix::Complex((&a + a.adjoint()) * Complex64::new(0.5, 0.0)),
    }
}

/// A low-rank correlation together with its exact eigen-subspace.
#[derive(Debug, Clone)]
pub struct LowRankCorrelation {
    pub matrix: CorrelationMatrix,
    pub subspace: Subspace,
}

/// `R[a, b] = β · r_h(‖p_a − p_b‖)` with the Clarke ACF of `field`.
///
/// Entries are looked up by grid offset, so ULA results are exactly
/// Toeplitz and UPA results exactly block-Toeplitz.
pub fn clarke_correlation_matrix(
    geometry: &ArrayGeometry,
    field: IsotropicField,
    beta: f64,
) -> Result<CorrelationMatrix> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("average gain must be positive, got {beta}")));
    }
    if field == IsotropicField::TwoD && !geometry.is_linear() {
        return Err(Error::InvalidGeometry(
            "the 2D isotropic model applies to linear arrays (n_y = 1) only".into(),
        ));
    }
    let (nx, ny) = (geometry.n_x(), geometry.n_y());
    let mut table = DMatrix::<f64>::zeros(nx, ny);
    for di in 0..nx {
        for dj in 0..ny {
            let dx = di as f64 * geometry.spacing_x();
            let dy = dj as f64 * geometry.spacing_y();
            table[(di, dj)] = beta * field.acf((dx * dx + dy * dy).sqrt());
        }
    }
    let n = geometry.len();
    let m = DMatrix::from_fn(n, n, |a, b| {
        let (ia, ja) = geometry.grid(a);
        let (ib, jb) = geometry.grid(b);
        table[(ia.abs_diff(ib), ja.abs_diff(jb))]
    });
    CorrelationMatrix::from_cmatrix(CMatrix::Real(m), beta)
}

/// Eigen-subspace of `r` under `retention`.
pub fn eigen_subspace(r: &CorrelationMatrix, retention: Retention) -> Result<Subspace> {
    r.eigen()?.subspace(retention)
}

/// Large-array rank of the isotropic correlation, `π N Δ_x Δ_y / λ²`.
pub fn asymptotic_rank(geometry: &ArrayGeometry) -> f64 {
    PI * geometry.len() as f64 * geometry.spacing_x() * geometry.spacing_y()
}

/// Correlation rebuilt from the `keep` largest eigenpairs of `r_iso`.
pub fn truncated_correlation(r_iso: &CorrelationMatrix, keep: usize, renormalize: bool) -> Result<CorrelationMatrix> {
    Ok(r_iso.eigen()?.truncate(keep, renormalize)?.matrix)
}
