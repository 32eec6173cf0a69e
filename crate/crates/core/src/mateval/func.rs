use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Field;

use super::{adjoint, frobenius};

/// Scalar functions available to the spectral calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatFn {
    /// `λ ↦ λ^α` on a nonnegative spectrum, `α > 0`.
    Pow(f64),
    Sin,
    Cos,
}

impl MatFn {
    fn apply(self, lambda: f64) -> f64 {
        match self {
            MatFn::Pow(alpha) => lambda.max(0.0).powf(alpha),
            MatFn::Sin => lambda.sin(),
            MatFn::Cos => lambda.cos(),
        }
    }
}

const SYMMETRY_TOL: f64 = 1e-8;
const NEGATIVE_SPECTRUM_TOL: f64 = 1e-10;

/// `V·diag(f(λ))·V^*` for a symmetric (hermitian) `s`.
pub fn apply_spectral<T: Field>(s: &DMatrix<T>, f: impl Fn(f64) -> f64) -> Result<DMatrix<T>> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::SizeMismatch("spectral calculus needs a square matrix".into()));
    }
    let asym = frobenius(&(s - adjoint(s)));
    if asym > SYMMETRY_TOL * frobenius(s).max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    if n == 0 {
        return Ok(s.clone());
    }
    let sym = (s + adjoint(s)).unscale(2.0);
    let eig = SymmetricEigen::new(sym);
    let vals: Vec<f64> = eig.eigenvalues.iter().map(|&l| f(l)).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut scaled = eig.eigenvectors.clone();
    for (j, v) in vals.iter().enumerate() {
        let mut col = scaled.column_mut(j);
        col *= T::from_real(*v);
    }
    Ok(scaled * adjoint(&eig.eigenvectors))
}

pub fn sym_matrix_function<T: Field>(func: MatFn, s: &DMatrix<T>) -> Result<DMatrix<T>> {
    if let MatFn::Pow(alpha) = func {
        if !(alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("matrix power exponent must be positive, got {alpha}")));
        }
        let asym = frobenius(&(s - adjoint(s)));
        if asym > SYMMETRY_TOL * frobenius(s).max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let sym = (s + adjoint(s)).unscale(2.0);
        let scale = frobenius(&sym).max(1.0);
        let min = SymmetricEigen::new(sym).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -NEGATIVE_SPECTRUM_TOL * scale {
            return Err(Error::NegativeSpectrum(min));
        }
    }
    apply_spectral(s, |l| func.apply(l))
}
