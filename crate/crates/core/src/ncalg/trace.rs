//! Trace polynomials: noncommutative polynomials whose coefficients live in
//! the commutative algebra generated by formal traces `tr(w)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Coeff;

use super::ncpoly::NCPoly;
use super::word::{Mode, Word};

/// `tr(w_1)⋯tr(w_r)·v`. The pure factors form a sorted multiset of cyclic
/// (or star-cyclic, in involution mode) canonical representatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceMonomial {
    pure: Vec<Word>,
    tail: Word,
}

impl TraceMonomial {
    pub fn new(pure: Vec<Word>, tail: Word, mode: Mode) -> Result<Self> {
        for w in pure.iter().chain(std::iter::once(&tail)) {
            w.check_mode(mode)?;
        }
        let star = mode.has_involution();
        let mut pure: Vec<Word> = pure.iter().map(|w| w.cyclic_canonical(star)).collect();
        pure.sort();
        Ok(TraceMonomial { pure, tail })
    }

    pub fn word(tail: Word) -> Self {
        TraceMonomial { pure: Vec::new(), tail }
    }

    pub fn pure(&self) -> &[Word] {
        &self.pure
    }

    pub fn tail(&self) -> &Word {
        &self.tail
    }

    pub fn is_pure(&self) -> bool {
        self.tail.is_empty()
    }

    /// `|v| + Σ|w_i|`.
    pub fn degree(&self) -> usize {
        self.tail.len() + self.pure.iter().map(Word::len).sum::<usize>()
    }

    pub fn has_starred(&self) -> bool {
        self.tail.has_starred() || self.pure.iter().any(Word::has_starred)
    }

    pub fn max_var(&self) -> usize {
        self.pure.iter().chain(std::iter::once(&self.tail)).map(Word::max_var).max().unwrap_or(0)
    }

    /// Pure factors multiply as multisets, tails by concatenation.
    pub fn mul(&self, other: &TraceMonomial) -> TraceMonomial {
        let mut pure = self.pure.clone();
        pure.extend(other.pure.iter().cloned());
        pure.sort();
        TraceMonomial { pure, tail: self.tail.concat(&other.tail) }
    }

    fn involution(&self, star: bool) -> TraceMonomial {
        let mut pure: Vec<Word> = self.pure.iter().map(|w| w.involution().cyclic_canonical(star)).collect();
        pure.sort();
        TraceMonomial { pure, tail: self.tail.involution() }
    }
}

impl fmt::Display for TraceMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.pure {
            write!(f, "tr({}) ", w)?;
        }
        write!(f, "{}", self.tail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracePoly<R> {
    coeffs: BTreeMap<TraceMonomial, R>,
    mode: Mode,
}

impl<R: Coeff> TracePoly<R> {
    pub fn zero(mode: Mode) -> Self {
        TracePoly { coeffs: BTreeMap::new(), mode }
    }

    pub fn from_ncpoly(p: &NCPoly<R>) -> Self {
        let mut out = Self::zero(p.mode());
        for (w, c) in p.terms() {
            out.add_term(TraceMonomial::word(w.clone()), c.clone());
        }
        out
    }

    /// `c·tr(w_1)⋯tr(w_r)·tail`.
    pub fn monomial(pure: Vec<Word>, tail: Word, c: R, mode: Mode) -> Result<Self> {
        let m = TraceMonomial::new(pure, tail, mode)?;
        let mut out = Self::zero(mode);
        out.add_term(m, c);
        Ok(out)
    }

    pub fn add_term(&mut self, m: TraceMonomial, c: R) {
        if c.is_zero() {
            return;
        }
        if m.has_starred() {
            self.mode = Mode::Involution;
        }
        match self.coeffs.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.coeffs.remove(&m);
                }
            }
            None => {
                self.coeffs.insert(m, c);
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TraceMonomial, &R)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, m: &TraceMonomial) -> R {
        self.coeffs.get(m).cloned().unwrap_or_else(R::zero)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every monomial has an empty tail.
    pub fn is_pure(&self) -> bool {
        self.coeffs.keys().all(TraceMonomial::is_pure)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().map(TraceMonomial::degree).max()
    }

    pub fn max_var(&self) -> usize {
        self.coeffs.keys().map(TraceMonomial::max_var).max().unwrap_or(0)
    }

    pub fn scale(&self, s: &R) -> Self {
        let mut out = Self::zero(self.mode);
        for (m, c) in &self.coeffs {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        out
    }

    /// Involution with `tr(w)^* = tr(w^*)` and conjugated scalars.
    pub fn involution(&self) -> Self {
        let mut out = Self::zero(Mode::Involution);
        for (m, c) in &self.coeffs {
            out.add_term(m.involution(true), c.conj());
        }
        out
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_mode(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_mode(other)?;
        Ok(self * other)
    }

    fn check_same_mode(&self, other: &Self) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::ModeViolation(format!(
                "cannot combine {} and {} trace polynomials",
                self.mode.name(),
                other.mode.name()
            )));
        }
        Ok(())
    }

    pub fn map_coeffs<S: Coeff>(&self, f: impl Fn(&R) -> S) -> TracePoly<S> {
        let mut out = TracePoly::zero(self.mode);
        for (m, c) in &self.coeffs {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

impl<'a, R: Coeff> Add for &'a TracePoly<R> {
    type Output = TracePoly<R>;
    fn add(self, rhs: Self) -> TracePoly<R> {
        let mut out = self.clone();
        out.mode = self.mode.join(rhs.mode);
        for (m, c) in &rhs.coeffs {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a, R: Coeff> Sub for &'a TracePoly<R> {
    type Output = TracePoly<R>;
    fn sub(self, rhs: Self) -> TracePoly<R> {
        let mut out = self.clone();
        out.mode = self.mode.join(rhs.mode);
        for (m, c) in &rhs.coeffs {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a, R: Coeff> Mul for &'a TracePoly<R> {
    type Output = TracePoly<R>;
    fn mul(self, rhs: Self) -> TracePoly<R> {
        let mut out = TracePoly::zero(self.mode.join(rhs.mode));
        for (a, ca) in &self.coeffs {
            for (b, cb) in &rhs.coeffs {
                out.add_term(a.mul(b), ca.clone() * cb.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn tail_concatenation() {
        let p = TracePoly::monomial(vec![w("x1")], w("x2"), 1.0, Mode::Free).unwrap();
        let q = TracePoly::from_ncpoly(&NCPoly::var(1, Mode::Free));
        let r = &p * &q;
        let expect = TraceMonomial::new(vec![w("x1")], w("x2 x1"), Mode::Free).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.coeff(&expect), 1.0);
        assert_eq!(expect.degree(), 3);
    }

    #[test]
    fn trace_cyclicity_cancels() {
        let a = TracePoly::monomial(vec![w("x1 x2")], Word::unit(), 1.0, Mode::Free).unwrap();
        let b = TracePoly::monomial(vec![w("x2 x1")], Word::unit(), 1.0, Mode::Free).unwrap();
        assert!((&a - &b).is_zero());
        assert!(a.is_pure());
    }

    #[test]
    fn star_cyclic_classes_merge_in_involution_mode() {
        let a = TracePoly::monomial(vec![w("x1 x2*")], Word::unit(), 1.0, Mode::Involution).unwrap();
        let b = TracePoly::monomial(vec![w("x2 x1*")], Word::unit(), 1.0, Mode::Involution).unwrap();
        assert!((&a - &b).is_zero());
    }

    #[test]
    fn pure_factor_multiset_is_sorted() {
        let a = TracePoly::monomial(vec![w("x2"), w("x1")], Word::unit(), 2.0, Mode::Free).unwrap();
        let b = TracePoly::monomial(vec![w("x1"), w("x2")], Word::unit(), -2.0, Mode::Free).unwrap();
        assert!((&a + &b).is_zero());
    }
}
