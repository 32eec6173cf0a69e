use nalgebra::{DMatrix, SVD};

use crate::error::{Error, Result};
use crate::scalar::Field;

use super::{adjoint, frobenius, MatTuple, RANK_CUTOFF};

/// Trace inner product `⟨a, b⟩ = tr(a b^*)`.
fn inner<T: Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc + *x * y.conjugate())
}

/// Linear subspace of `M_n(F)` with a basis orthonormal for the trace inner product.
#[derive(Debug, Clone)]
pub struct SubspaceBasis<T: Field> {
    n: usize,
    basis: Vec<DMatrix<T>>,
}

impl<T: Field> SubspaceBasis<T> {
    pub fn empty(n: usize) -> Self {
        SubspaceBasis { n, basis: Vec::new() }
    }

    /// Orthonormalizes a spanning list; vectors whose residual falls below
    /// `rank_tol` times their norm are treated as dependent.
    pub fn from_spanning(n: usize, mats: &[DMatrix<T>], rank_tol: f64) -> Result<Self> {
        let mut v = Self::empty(n);
        for m in mats {
            v.try_push(m, rank_tol)?;
        }
        Ok(v)
    }

    pub fn full(n: usize) -> Self {
        let mut basis = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let mut m = DMatrix::zeros(n, n);
                m[(i, j)] = T::one();
                basis.push(m);
            }
        }
        SubspaceBasis { n, basis }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DMatrix<T>] {
        &self.basis
    }

    /// Coordinates `⟨m, v_i⟩` in the orthonormal basis.
    pub fn coordinates(&self, m: &DMatrix<T>) -> Vec<T> {
        self.basis.iter().map(|v| inner(m, v)).collect()
    }

    pub fn project(&self, m: &DMatrix<T>) -> DMatrix<T> {
        let mut p = DMatrix::zeros(self.n, self.n);
        for v in &self.basis {
            p += v * inner(m, v);
        }
        p
    }

    /// Adds `m` to the span if it is independent; returns whether it was added.
    pub fn try_push(&mut self, m: &DMatrix<T>, rank_tol: f64) -> Result<bool> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(Error::SizeMismatch(format!("{}×{} matrix in a subspace of M_{}", m.nrows(), m.ncols(), self.n)));
        }
        let norm0 = frobenius(m);
        if norm0 == 0.0 || self.basis.len() == self.n * self.n {
            return Ok(false);
        }
        let mut r = m.clone();
        for _ in 0..2 {
            for v in &self.basis {
                r -= v * inner(&r, v);
            }
        }
        let norm = frobenius(&r);
        if norm <= rank_tol * norm0 {
            return Ok(false);
        }
        self.basis.push(r.unscale(norm));
        Ok(true)
    }

    /// Largest residual of a basis vector of `other` against this subspace.
    pub fn contains_residual(&self, other: &SubspaceBasis<T>) -> f64 {
        other.basis.iter().map(|m| subspace_residual(m, self).unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }

    /// Symmetric span-equality defect: zero iff the spans coincide.
    pub fn span_distance(&self, other: &SubspaceBasis<T>) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.contains_residual(other).max(other.contains_residual(self))
    }
}

/// Frobenius distance from `m` to its orthogonal projection onto `span(v)`.
pub fn subspace_residual<T: Field>(m: &DMatrix<T>, v: &SubspaceBasis<T>) -> Result<f64> {
    if m.nrows() != v.n || m.ncols() != v.n {
        return Err(Error::SizeMismatch(format!("{}×{} matrix against a subspace of M_{}", m.nrows(), m.ncols(), v.n)));
    }
    Ok(frobenius(&(m - v.project(m))))
}

/// `{c : cb = bc for all b ∈ B}` as the null space of the stacked commutator map.
///
/// Singular values below `cutoff · max(σ_max, max ‖b‖_F)` are treated as zero;
/// the second scale keeps near-scalar inputs from producing spurious ranks.
pub fn centralizer<T: Field>(b: &[DMatrix<T>], n: usize, cutoff: Option<f64>) -> Result<SubspaceBasis<T>> {
    let cutoff = cutoff.unwrap_or(RANK_CUTOFF);
    if b.iter().any(|m| m.nrows() != n || m.ncols() != n) {
        return Err(Error::SizeMismatch(format!("centralizer in M_{} of matrices of another size", n)));
    }
    let nn = n * n;
    if b.is_empty() || nn == 0 {
        return Ok(SubspaceBasis::full(n));
    }
    let rows = (b.len() * nn).max(nn);
    let mut k = DMatrix::<T>::zeros(rows, nn);
    for col in 0..nn {
        let (i, j) = (col % n, col / n);
        let mut e = DMatrix::<T>::zeros(n, n);
        e[(i, j)] = T::one();
        for (slot, bm) in b.iter().enumerate() {
            let c = &e * bm - bm * &e;
            for (r, x) in c.iter().enumerate() {
                k[(slot * nn + r, col)] = *x;
            }
        }
    }
    let svd = SVD::new(k, false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let scale = b.iter().map(frobenius).fold(smax, f64::max);
    let mut basis = Vec::new();
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff * scale || scale == 0.0 {
            let row = v_t.row(r);
            basis.push(DMatrix::from_iterator(n, n, row.iter().map(|x| x.conjugate())));
        }
    }
    Ok(SubspaceBasis { n, basis })
}

/// Span closure of `{I, A_k}` (plus `A_k^*` with involution) under multiplication.
pub fn generated_algebra<T: Field>(a: &MatTuple<T>, with_involution: bool, rank_tol: Option<f64>) -> Result<SubspaceBasis<T>> {
    let tol = rank_tol.unwrap_or(1e-9);
    let n = a.n();
    let mut gens: Vec<DMatrix<T>> = a.mats().to_vec();
    if with_involution {
        gens.extend(a.mats().iter().map(adjoint));
    }
    let mut v = SubspaceBasis::empty(n);
    v.try_push(&DMatrix::identity(n, n), tol)?;
    for g in &gens {
        v.try_push(g, tol)?;
    }
    let mut frontier_start = 0;
    for _round in 0..=(n * n) {
        let frontier_end = v.dim();
        if frontier_start == frontier_end {
            break;
        }
        let frontier: Vec<DMatrix<T>> = v.basis[frontier_start..frontier_end].to_vec();
        for b in &frontier {
            for g in &gens {
                v.try_push(&(b * g), tol)?;
            }
        }
        frontier_start = frontier_end;
    }
    Ok(v)
}
