//! Dense complex linear algebra helpers.
//!
//! nalgebra multiplies complex matrices with a generic kernel that is an
//! order of magnitude slower than its real GEMM, so products are formed from
//! real and imaginary parts. Matrices whose imaginary part vanishes (every
//! Clarke correlation and its eigenvectors) are kept real.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// A complex matrix, stored as a real one when its imaginary part is zero.
#[derive(Debug, Clone, PartialEq)]
pub enum CMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl CMatrix {
    /// Wraps `m`, demoting it to the real representation when possible.
    pub fn from_complex(m: DMatrix<Complex64>) -> Self {
        if m.iter().all(|z| z.im == 0.0) {
            CMatrix::Real(m.map(|z| z.re))
        } else {
            CMatrix::Complex(m)
        }
    }

    pub fn nrows(&self) -> usize {
        match self {
            CMatrix::Real(m) => m.nrows(),
            CMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            CMatrix::Real(m) => m.ncols(),
            CMatrix::Complex(m) => m.ncols(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, CMatrix::Real(_))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self {
            CMatrix::Real(m) => Complex64::new(m[(i, j)], 0.0),
            CMatrix::Complex(m) => m[(i, j)],
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match self {
            CMatrix::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            CMatrix::Complex(m) => m.clone(),
        }
    }

    /// `self · rhs`
    pub fn mul(&self, rhs: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let (re, im) = split(rhs);
        match self {
            CMatrix::Real(a) => join(&(a * &re), &(a * &im)),
            CMatrix::Complex(a) => {
                let (ar, ai) = split(a);
                join(&(&ar * &re - &ai * &im), &(&ar * &im + &ai * &re))
            }
        }
    }

    /// `selfᴴ · rhs`
    pub fn adjoint_mul(&self, rhs: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let (re, im) = split(rhs);
        match self {
            CMatrix::Real(a) => join(&a.tr_mul(&re), &a.tr_mul(&im)),
            CMatrix::Complex(a) => {
                let (ar, ai) = split(a);
                join(&(ar.tr_mul(&re) + ai.tr_mul(&im)), &(ar.tr_mul(&im) - ai.tr_mul(&re)))
            }
        }
    }

    pub fn mul_vec(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        column(self.mul(&as_matrix(v)))
    }

    pub fn adjoint_mul_vec(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        column(self.adjoint_mul(&as_matrix(v)))
    }

    /// Scales every column `j` by `weights[j]`.
    pub fn scale_columns(&self, weights: &[f64]) -> CMatrix {
        match self {
            CMatrix::Real(m) => {
                let mut out = m.clone();
                for (mut c, &w) in out.column_iter_mut().zip(weights) {
                    c *= w;
                }
                CMatrix::Real(out)
            }
            CMatrix::Complex(m) => {
                let mut out = m.clone();
                for (mut c, &w) in out.column_iter_mut().zip(weights) {
                    c *= Complex64::new(w, 0.0);
                }
                CMatrix::Complex(out)
            }
        }
    }

    /// `A · Bᴴ` for two matrices of the same representation family.
    pub fn mul_adjoint(&self, other: &CMatrix) -> CMatrix {
        match (self, other) {
            (CMatrix::Real(a), CMatrix::Real(b)) => CMatrix::Real(a * b.transpose()),
            _ => {
                let b = other.to_complex().adjoint();
                CMatrix::Complex(self.mul(&b))
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self {
            CMatrix::Real(m) => m.norm(),
            CMatrix::Complex(m) => m.norm(),
        }
    }
}

/// Real and imaginary parts of a complex matrix.
pub fn split(m: &DMatrix<Complex64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

pub fn join(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<Complex64> {
    re.zip_map(im, Complex64::new)
}

fn as_matrix(v: &DVector<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

fn column(m: DMatrix<Complex64>) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

/// Complex matrix product through four real GEMMs.
pub fn cmul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    CMatrix::Complex(a.clone()).mul(b)
}
