//! Dense matrix engine: tuples of matrices, polynomial evaluation, group
//! sampling, spectral calculus and subspace (centralizer / generated algebra)
//! computations.

mod eval;
mod func;
mod group;
mod subspace;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Field};

pub use eval::{eval_standard, eval_genpoly, eval_ncpoly, eval_ncpoly_derivative, eval_tracepoly, eval_word, kron_identity};
pub use func::{apply_spectral, sym_matrix_function, MatFn};
pub use group::{conjugate, is_group_member, random_group_element, Group};
pub use subspace::{centralizer, generated_algebra, subspace_residual, SubspaceBasis};

/// Default relative tolerance for numeric comparisons.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default relative singular-value cutoff for rank decisions.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Conjugate transpose (plain transpose over the reals).
pub fn adjoint<R: Coeff>(m: &DMatrix<R>) -> DMatrix<R> {
    m.transpose().map(|x| x.conj())
}

pub fn trace<R: Coeff>(m: &DMatrix<R>) -> R {
    let mut t = R::zero();
    for i in 0..m.nrows().min(m.ncols()) {
        t += m[(i, i)].clone();
    }
    t
}

/// `n×n` matrix unit `e_{ij}` with 1-based indices.
pub fn matrix_unit<R: Coeff>(n: usize, i: usize, j: usize) -> DMatrix<R> {
    let mut m = DMatrix::zeros(n, n);
    m[(i - 1, j - 1)] = R::one();
    m
}

pub fn frobenius<T: Field>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

/// Spectral norm (largest singular value).
pub fn op_norm<T: Field>(m: &DMatrix<T>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// 2-norm condition number, infinite for singular matrices.
pub fn condition_number<T: Field>(m: &DMatrix<T>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Block diagonal `diag(a, b)`.
pub fn block_diag<R: Coeff>(a: &DMatrix<R>, b: &DMatrix<R>) -> DMatrix<R> {
    let (m, n) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(m + n, m + n);
    out.view_mut((0, 0), (m, m)).copy_from(a);
    out.view_mut((m, m), (n, n)).copy_from(b);
    out
}

/// `[[a, b], [c, d]]` from four equally sized square blocks.
pub fn block2<R: Coeff>(a: &DMatrix<R>, b: &DMatrix<R>, c: &DMatrix<R>, d: &DMatrix<R>) -> DMatrix<R> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((0, n), (n, n)).copy_from(b);
    out.view_mut((n, 0), (n, n)).copy_from(c);
    out.view_mut((n, n), (n, n)).copy_from(d);
    out
}

/// A `g`-tuple of `n×n` matrices: a point of `M_n(F)^g`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatTuple<R: Coeff> {
    mats: Vec<DMatrix<R>>,
}

impl<R: Coeff> MatTuple<R> {
    pub fn new(mats: Vec<DMatrix<R>>) -> Result<Self> {
        if let Some(first) = mats.first() {
            let n = first.nrows();
            if mats.iter().any(|m| m.nrows() != n || m.ncols() != n) {
                return Err(Error::SizeMismatch("tuple components must be square of equal size".into()));
            }
        }
        Ok(MatTuple { mats })
    }

    pub fn single(m: DMatrix<R>) -> Self {
        MatTuple::new(vec![m]).expect("a single square matrix is a valid tuple")
    }

    pub fn zeros(g: usize, n: usize) -> Self {
        MatTuple { mats: vec![DMatrix::zeros(n, n); g] }
    }

    pub fn g(&self) -> usize {
        self.mats.len()
    }

    /// Matrix size (0 for an empty tuple).
    pub fn n(&self) -> usize {
        self.mats.first().map_or(0, |m| m.nrows())
    }

    pub fn mats(&self) -> &[DMatrix<R>] {
        &self.mats
    }

    pub fn into_mats(self) -> Vec<DMatrix<R>> {
        self.mats
    }

    pub fn get(&self, k: usize) -> &DMatrix<R> {
        &self.mats[k]
    }

    pub fn map(&self, f: impl Fn(&DMatrix<R>) -> DMatrix<R>) -> Self {
        MatTuple { mats: self.mats.iter().map(f).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&DMatrix<R>, &DMatrix<R>) -> DMatrix<R>) -> Result<Self> {
        if self.g() != other.g() || self.n() != other.n() {
            return Err(Error::SizeMismatch(format!(
                "tuples of shape {}×{} and {}×{}",
                self.g(),
                self.n(),
                other.g(),
                other.n()
            )));
        }
        Ok(MatTuple { mats: self.mats.iter().zip(&other.mats).map(|(a, b)| f(a, b)).collect() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|m| m * s.clone())
    }

    /// Componentwise block diagonal `X ⊕ Y`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.g() != other.g() {
            return Err(Error::SizeMismatch(format!("direct sum of a {}-tuple and a {}-tuple", self.g(), other.g())));
        }
        Ok(MatTuple { mats: self.mats.iter().zip(&other.mats).map(|(a, b)| block_diag(a, b)).collect() })
    }

    /// Componentwise `a ⊗ I_s`.
    pub fn kron_identity(&self, s: usize) -> Self {
        self.map(|m| kron_identity(m, s))
    }

    /// Concatenation of the components of two tuples.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.g() > 0 && other.g() > 0 && self.n() != other.n() {
            return Err(Error::SizeMismatch("cannot concatenate tuples of different sizes".into()));
        }
        let mut mats = self.mats.clone();
        mats.extend(other.mats.iter().cloned());
        Ok(MatTuple { mats })
    }

    pub fn split_at(&self, k: usize) -> (Self, Self) {
        (MatTuple { mats: self.mats[..k].to_vec() }, MatTuple { mats: self.mats[k..].to_vec() })
    }

    pub fn adjoint(&self) -> Self {
        self.map(adjoint)
    }
}

impl<T: Field> MatTuple<T> {
    /// Frobenius norm of the stacked tuple, `(Σ_k ‖X_k‖_F²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.mats.iter().map(|m| frobenius(m).powi(2)).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.mats.iter().all(|m| m.iter().all(|x| {
            let (re, im) = x.parts();
            re.is_finite() && im.is_finite()
        }))
    }

    /// Standard Gaussian entries.
    pub fn random_normal<G: Rng + ?Sized>(g: usize, n: usize, rng: &mut G) -> Self {
        MatTuple { mats: (0..g).map(|_| DMatrix::from_fn(n, n, |_, _| T::sample_normal(rng))).collect() }
    }

    /// Uniform sample from the Frobenius ball of the given radius.
    pub fn random_in_ball<G: Rng + ?Sized>(g: usize, n: usize, radius: f64, rng: &mut G) -> Self {
        let x = Self::random_normal(g, n, rng);
        let dim = (g * n * n * if T::IS_COMPLEX { 2 } else { 1 }).max(1) as f64;
        let u: f64 = rng.random::<f64>();
        let r = radius * u.powf(1.0 / dim);
        let norm = x.norm();
        if norm == 0.0 {
            return x;
        }
        x.scale(&T::from_real(r / norm))
    }

    /// Random sample on the sphere of the given radius.
    pub fn random_on_sphere<G: Rng + ?Sized>(g: usize, n: usize, radius: f64, rng: &mut G) -> Self {
        let x = Self::random_normal(g, n, rng);
        let norm = x.norm();
        x.scale(&T::from_real(radius / norm))
    }

    /// Real coordinates of the tuple: real (and imaginary) parts of every entry, column-major.
    pub fn to_real_vec(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for m in &self.mats {
            for x in m.iter() {
                let (re, im) = x.parts();
                v.push(re);
                if T::IS_COMPLEX {
                    v.push(im);
                }
            }
        }
        v
    }

    pub fn from_real_vec(g: usize, n: usize, v: &[f64]) -> Self {
        let stride = if T::IS_COMPLEX { 2 } else { 1 };
        assert_eq!(v.len(), g * n * n * stride);
        let mut it = v.chunks(stride);
        let mats = (0..g)
            .map(|_| {
                let mut m = DMatrix::zeros(n, n);
                for x in m.iter_mut() {
                    let c = it.next().unwrap();
                    *x = T::from_parts(c[0], if T::IS_COMPLEX { c[1] } else { 0.0 });
                }
                m
            })
            .collect();
        MatTuple { mats }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_sum_sizes() {
        let x = MatTuple::<f64>::zeros(2, 2);
        let y = MatTuple::<f64>::zeros(2, 3);
        let z = x.direct_sum(&y).unwrap();
        assert_eq!(z.n(), 5);
        assert_eq!(z.g(), 2);
        assert!(x.direct_sum(&MatTuple::zeros(1, 2)).is_err());
    }

    #[test]
    fn real_vec_round_trip() {
        use num_complex::Complex64;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let x = MatTuple::<Complex64>::random_normal(2, 3, &mut rng);
        let v = x.to_real_vec();
        assert_eq!(MatTuple::from_real_vec(2, 3, &v), x);
    }

    #[test]
    fn ball_sampling_respects_radius() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert!(MatTuple::<f64>::random_in_ball(2, 3, 0.5, &mut rng).norm() <= 0.5 + 1e-12);
        }
    }
}
