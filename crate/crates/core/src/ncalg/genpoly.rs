//! Generalized polynomials: elements of the free product `M_n(F) ∗ F⟨X⟩`,
//! i.e. words whose letters are interleaved with fixed `n×n` coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Coeff;

use super::word::{Letter, Mode, Word};

/// `a_0 x_{k_1} a_1 ⋯ x_{k_ℓ} a_ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenTerm<R: Coeff> {
    pub mats: Vec<DMatrix<R>>,
    pub letters: Vec<Letter>,
}

impl<R: Coeff> GenTerm<R> {
    pub fn new(mats: Vec<DMatrix<R>>, letters: Vec<Letter>) -> Result<Self> {
        if mats.len() != letters.len() + 1 {
            return Err(Error::SizeMismatch(format!(
                "generalized term needs {} coefficients for {} letters, got {}",
                letters.len() + 1,
                letters.len(),
                mats.len()
            )));
        }
        let n = mats[0].nrows();
        if mats.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::SizeMismatch("coefficients of a term must all be n×n".into()));
        }
        Ok(GenTerm { mats, letters })
    }

    /// `c·I_n` interleaved with the letters of `w`.
    pub fn scalar_word(c: R, w: &Word, n: usize) -> Self {
        let mut mats = vec![DMatrix::identity(n, n); w.len() + 1];
        mats[0] *= c;
        GenTerm { mats, letters: w.0.clone() }
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    pub fn size(&self) -> usize {
        self.mats[0].nrows()
    }

    /// Concatenation; the two boundary coefficients are multiplied together.
    pub fn mul(&self, other: &GenTerm<R>) -> GenTerm<R> {
        let mut mats: Vec<DMatrix<R>> = self.mats[..self.mats.len() - 1].to_vec();
        mats.push(self.mats.last().unwrap() * &other.mats[0]);
        mats.extend(other.mats[1..].iter().cloned());
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        GenTerm { mats, letters }
    }
}

/// Basis monomial `e_{i_0 j_0} x_{k_1} e_{i_1 j_1} ⋯ x_{k_ℓ} e_{i_ℓ j_ℓ}` (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisMonomial {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub letters: Vec<Letter>,
}

#[derive(Debug, Clone)]
pub struct GenPoly<R: Coeff> {
    n: usize,
    terms: Vec<GenTerm<R>>,
    mode: Mode,
}

impl<R: Coeff> GenPoly<R> {
    pub fn zero(n: usize, mode: Mode) -> Self {
        GenPoly { n, terms: Vec::new(), mode }
    }

    pub fn from_terms(n: usize, mode: Mode, terms: Vec<GenTerm<R>>) -> Result<Self> {
        let mut p = Self::zero(n, mode);
        for t in terms {
            p.push(t)?;
        }
        Ok(p)
    }

    pub fn push(&mut self, t: GenTerm<R>) -> Result<()> {
        if t.size() != self.n {
            return Err(Error::SizeMismatch(format!("term of size {} in a size-{} polynomial", t.size(), self.n)));
        }
        if !self.mode.has_involution() && t.letters.iter().any(|l| l.starred) {
            return Err(Error::ModeViolation("starred letter in involution-free generalized polynomial".into()));
        }
        self.terms.push(t);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> &[GenTerm<R>] {
        &self.terms
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.iter().map(GenTerm::degree).max()
    }

    pub fn max_var(&self) -> usize {
        self.terms.iter().flat_map(|t| t.letters.iter().map(|l| l.var)).max().unwrap_or(0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self * other)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(format!("coefficient sizes {} and {}", self.n, other.n)));
        }
        if self.mode != other.mode {
            return Err(Error::ModeViolation("mixed modes in generalized polynomial arithmetic".into()));
        }
        Ok(())
    }

    pub fn scale(&self, s: &R) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.mats[0] *= s.clone();
        }
        out
    }

    /// Coefficient map over basis monomials, with exact zeros removed.
    pub fn expand_basis(&self) -> BTreeMap<BasisMonomial, R> {
        let mut out: BTreeMap<BasisMonomial, R> = BTreeMap::new();
        for t in &self.terms {
            let entries: Vec<Vec<(usize, usize, R)>> = t
                .mats
                .iter()
                .map(|m| {
                    let mut nz = Vec::new();
                    for i in 0..m.nrows() {
                        for j in 0..m.ncols() {
                            if !m[(i, j)].is_zero() {
                                nz.push((i, j, m[(i, j)].clone()));
                            }
                        }
                    }
                    nz
                })
                .collect();
            if entries.iter().any(Vec::is_empty) {
                continue;
            }
            let mut idx = vec![0usize; entries.len()];
            'odometer: loop {
                let mut rows = Vec::with_capacity(idx.len());
                let mut cols = Vec::with_capacity(idx.len());
                let mut c = R::one();
                for (slot, &k) in idx.iter().enumerate() {
                    let (i, j, ref v) = entries[slot][k];
                    rows.push(i);
                    cols.push(j);
                    c *= v.clone();
                }
                let key = BasisMonomial { rows, cols, letters: t.letters.clone() };
                let slot = out.entry(key.clone()).or_insert_with(R::zero);
                *slot += c;
                if slot.is_zero() {
                    out.remove(&key);
                }
                let mut pos = idx.len();
                loop {
                    if pos == 0 {
                        break 'odometer;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < entries[pos].len() {
                        continue 'odometer;
                    }
                    idx[pos] = 0;
                }
            }
        }
        out
    }

    /// Reassembles a polynomial with one matrix-unit term per basis monomial.
    pub fn from_basis(n: usize, mode: Mode, basis: &BTreeMap<BasisMonomial, R>) -> Result<Self> {
        let mut p = Self::zero(n, mode);
        for (b, c) in basis {
            let mats = b
                .rows
                .iter()
                .zip(&b.cols)
                .enumerate()
                .map(|(slot, (&i, &j))| {
                    let mut m = DMatrix::zeros(n, n);
                    m[(i, j)] = if slot == 0 { c.clone() } else { R::one() };
                    m
                })
                .collect();
            p.push(GenTerm::new(mats, b.letters.clone())?)?;
        }
        Ok(p)
    }

    /// Equality in the free product, decided on basis expansions.
    pub fn equals(&self, other: &Self) -> bool {
        self.n == other.n && self.expand_basis() == other.expand_basis()
    }

    pub fn homogeneous_part(&self, m: usize) -> Self {
        GenPoly {
            n: self.n,
            mode: self.mode,
            terms: self.terms.iter().filter(|t| t.degree() == m).cloned().collect(),
        }
    }
}

impl<'a, R: Coeff> Add for &'a GenPoly<R> {
    type Output = GenPoly<R>;
    fn add(self, rhs: Self) -> GenPoly<R> {
        assert_eq!(self.n, rhs.n, "coefficient size mismatch");
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        GenPoly { n: self.n, terms, mode: self.mode.join(rhs.mode) }
    }
}

impl<'a, R: Coeff> Mul for &'a GenPoly<R> {
    type Output = GenPoly<R>;
    fn mul(self, rhs: Self) -> GenPoly<R> {
        assert_eq!(self.n, rhs.n, "coefficient size mismatch");
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                terms.push(a.mul(b));
            }
        }
        GenPoly { n: self.n, terms, mode: self.mode.join(rhs.mode) }
    }
}
