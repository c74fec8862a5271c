use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Which eigenpairs of a correlation matrix count as its signal subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Retention {
    /// Eigenvalues strictly above `ε · λ_max`.
    RelativeThreshold(f64),
    /// The shortest leading set whose eigenvalues reach fraction `p` of the
    /// positive spectrum; `p ≥ 1` keeps everything above the rounding floor.
    PowerFraction(f64),
    /// Exactly the `r` largest.
    FixedRank(usize),
}

impl Default for Retention {
    fn default() -> Self {
        Retention::RelativeThreshold(1e-5)
    }
}

impl fmt::Display for Retention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Retention::RelativeThreshold(e) => write!(f, "rel:{e:e}"),
            Retention::PowerFraction(p) => write!(f, "power:{p}"),
            Retention::FixedRank(r) => write!(f, "rank:{r}"),
        }
    }
}

/// Parses `rel:<ε>`, `power:<p>` or `rank:<r>`.
impl FromStr for Retention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidArgument(format!(
                "cannot parse retention policy `{s}` (expected rel:<eps>, power:<p> or rank:<r>)"
            ))
        };
        let (kind, value) = s.trim().split_once(':').ok_or_else(bad)?;
        let policy = match kind.trim() {
            "rel" | "relative" => Retention::RelativeThreshold(value.trim().parse().map_err(|_| bad())?),
            "power" | "fraction" => Retention::PowerFraction(value.trim().parse().map_err(|_| bad())?),
            "rank" => Retention::FixedRank(value.trim().parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        policy.validate()?;
        Ok(policy)
    }
}

impl Retention {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Retention::RelativeThreshold(e) if !(e > 0.0 && e < 1.0) => Err(Error::InvalidArgument(format!(
                "relative threshold must lie in (0, 1), got {e}"
            ))),
            Retention::PowerFraction(p) if !(p > 0.0 && p <= 1.0) => Err(Error::InvalidArgument(format!(
                "power fraction must lie in (0, 1], got {p}"
            ))),
            Retention::FixedRank(0) => Err(Error::InvalidArgument("fixed rank must be positive".into())),
            _ => Ok(()),
        }
    }

    /// Number of leading eigenvalues kept from a descending spectrum.
    pub(crate) fn count(&self, descending: &[f64]) -> Result<usize> {
        self.validate()?;
        let lmax = descending.first().copied().unwrap_or(0.0);
        if lmax <= 0.0 {
            return Ok(0);
        }
        let floor = rounding_floor(descending.len(), lmax);
        let above_floor = descending.iter().take_while(|&&l| l > floor).count();
        match *self {
            Retention::RelativeThreshold(eps) => {
                Ok(descending.iter().take_while(|&&l| l > eps * lmax && l > 0.0).count())
            }
            Retention::PowerFraction(p) => {
                if p >= 1.0 {
                    return Ok(above_floor);
                }
                let total: f64 = descending.iter().filter(|&&l| l > 0.0).sum();
                let mut acc = 0.0;
                for (k, &l) in descending[..above_floor].iter().enumerate() {
                    acc += l;
                    if acc >= p * total {
                        return Ok(k + 1);
                    }
                }
                Ok(above_floor)
            }
            Retention::FixedRank(r) => {
                if r > above_floor {
                    Err(Error::InvalidArgument(format!(
                        "requested rank {r} exceeds the {above_floor} eigenvalues above the rounding floor"
                    )))
                } else {
                    Ok(r)
                }
            }
        }
    }
}

/// Eigenvalues at or below this are indistinguishable from rounding noise of
/// an `n × n` eigensolve.
pub(crate) fn rounding_floor(n: usize, lmax: f64) -> f64 {
    n as f64 * f64::EPSILON * lmax
}

/// Orthonormal eigenvector basis `U` (N × r) with eigenvalues `Λ`, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
    eigenvalues: Vec<f64>,
}

impl Subspace {
    pub(crate) fn from_parts(basis: CMatrix, eigenvalues: Vec<f64>) -> Self {
        debug_assert_eq!(basis.ncols(), eigenvalues.len());
        Subspace { basis, eigenvalues }
    }

    /// The zero-dimensional subspace of `C^dim`.
    pub fn empty(dim: usize) -> Self {
        Subspace {
            basis: CMatrix::Real(DMatrix::zeros(dim, 0)),
            eigenvalues: Vec::new(),
        }
    }

    /// Builds a subspace from an explicit basis, checking orthonormality.
    pub fn from_basis(basis: DMatrix<Complex64>, eigenvalues: Vec<f64>) -> Result<Self> {
        if basis.ncols() != eigenvalues.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.ncols(),
                found: eigenvalues.len(),
            });
        }
        let s = Subspace {
            basis: CMatrix::from_complex(basis),
            eigenvalues,
        };
        let err = s.orthonormality_error();
        if err > 1e-10 {
            return Err(Error::InvalidArgument(format!("basis columns are not orthonormal (error {err:e})")));
        }
        Ok(s)
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// `max |UᴴU − I|` entrywise.
    pub fn orthonormality_error(&self) -> f64 {
        let u = self.basis.to_complex();
        let gram = u.adjoint() * &u;
        let r = self.rank();
        let mut worst: f64 = 0.0;
        for i in 0..r {
            for j in 0..r {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Orthogonal projection `UUᴴ y`.
    pub fn project(&self, y: &DVector<Complex64>) -> DVector<Complex64> {
        if self.rank() == 0 {
            return DVector::zeros(y.len());
        }
        self.basis.mul_vec(&self.basis.adjoint_mul_vec(y))
    }

    /// Projects every column of `y`.
    pub fn project_columns(&self, y: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        if self.rank() == 0 {
            return DMatrix::zeros(y.nrows(), y.ncols());
        }
        self.basis.mul(&self.basis.adjoint_mul(y))
    }

    /// `U Λ^{1/2}`, the colouring map of the correlated Gaussian generator.
    pub fn colouring(&self) -> CMatrix {
        let roots: Vec<f64> = self.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        self.basis.scale_columns(&roots)
    }

    /// `U Λ Uᴴ`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        self.basis.scale_columns(&self.eigenvalues).mul_adjoint(&self.basis).to_complex()
    }

    /// Frobenius norm of `(I − UUᴴ) V` for `V` the basis of `other`; zero
    /// when `other` lies inside this subspace.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        let v = other.basis.to_complex();
        let residual = &v - self.project_columns(&v);
        residual.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retention_parsing() {
        assert_eq!("rel:1e-5".parse::<Retention>().unwrap(), Retention::RelativeThreshold(1e-5));
        assert_eq!("power:0.99".parse::<Retention>().unwrap(), Retention::PowerFraction(0.99));
        assert_eq!("rank:12".parse::<Retention>().unwrap(), Retention::FixedRank(12));
        assert!("rank:0".parse::<Retention>().is_err());
        assert!("rel:2".parse::<Retention>().is_err());
        assert!("bogus".parse::<Retention>().is_err());
        let p = Retention::RelativeThreshold(1e-13);
        assert_eq!(p.to_string().parse::<Retention>().unwrap(), p);
    }

    #[test]
    fn retention_counts() {
        let spectrum = [4.0, 2.0, 1.0, 0.5, 1e-9, 0.0];
        assert_eq!(Retention::RelativeThreshold(0.2).count(&spectrum).unwrap(), 3);
        assert_eq!(Retention::RelativeThreshold(1e-12).count(&spectrum).unwrap(), 5);
        assert_eq!(Retention::PowerFraction(0.75).count(&spectrum).unwrap(), 2);
        assert_eq!(Retention::PowerFraction(1.0).count(&spectrum).unwrap(), 5);
        assert_eq!(Retention::FixedRank(4).count(&spectrum).unwrap(), 4);
        assert!(Retention::FixedRank(6).count(&spectrum).is_err());
    }

    #[test]
    fn empty_subspace_projects_to_zero() {
        let s = Subspace::empty(3);
        let y = DVector::from_element(3, Complex64::new(1.0, 2.0));
        assert_eq!(s.project(&y), DVector::zeros(3));
        assert_eq!(s.rank(), 0);
        assert_eq!(s.orthonormality_error(), 0.0);
    }

    #[test]
    fn rejects_non_orthonormal_basis() {
        let b = DMatrix::from_element(2, 1, Complex64::new(1.0, 0.0));
        assert!(Subspace::from_basis(b, vec![1.0]).is_err());
    }
}
