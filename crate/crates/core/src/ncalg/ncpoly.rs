use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Coeff;

use super::word::{Letter, Mode, Word};

/// Sparse element of the free algebra `F⟨X⟩` (or `F⟨X, X^t⟩` in involution mode).
///
/// Zero coefficients are never stored. The `std::ops` impls promote mixed
/// modes to [`Mode::Involution`]; use the `checked_*` methods to reject them.
#[derive(Debug, Clone, PartialEq)]
pub struct NCPoly<R> {
    coeffs: BTreeMap<Word, R>,
    mode: Mode,
}

impl<R: Coeff> NCPoly<R> {
    pub fn zero(mode: Mode) -> Self {
        NCPoly { coeffs: BTreeMap::new(), mode }
    }

    pub fn one(mode: Mode) -> Self {
        Self::constant(R::one(), mode)
    }

    pub fn constant(c: R, mode: Mode) -> Self {
        Self::monomial(Word::unit(), c, mode).expect("unit word is valid in every mode")
    }

    pub fn monomial(w: Word, c: R, mode: Mode) -> Result<Self> {
        w.check_mode(mode)?;
        let mut p = Self::zero(mode);
        if !c.is_zero() {
            p.coeffs.insert(w, c);
        }
        Ok(p)
    }

    /// The variable `x_k` as a polynomial.
    pub fn var(k: usize, mode: Mode) -> Self {
        Self::monomial(Word::letter(Letter::x(k)), R::one(), mode).unwrap()
    }

    /// Builds a polynomial from terms, summing repeated words. The mode is
    /// promoted to involution if any word contains a starred letter.
    pub fn from_terms(mode: Mode, terms: impl IntoIterator<Item = (Word, R)>) -> Self {
        let mut p = Self::zero(mode);
        for (w, c) in terms {
            if w.has_starred() {
                p.mode = Mode::Involution;
            }
            p.add_term(w, c);
        }
        p
    }

    pub fn add_term(&mut self, w: Word, c: R) {
        if c.is_zero() {
            return;
        }
        if w.has_starred() {
            self.mode = Mode::Involution;
        }
        match self.coeffs.get_mut(&w) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.coeffs.remove(&w);
                }
            }
            None => {
                self.coeffs.insert(w, c);
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(mut self, mode: Mode) -> Result<Self> {
        if mode == Mode::Free {
            for w in self.coeffs.keys() {
                w.check_mode(mode)?;
            }
        }
        self.mode = mode;
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &R)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, w: &Word) -> R {
        self.coeffs.get(w).cloned().unwrap_or_else(R::zero)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Maximal word length, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().map(Word::len).max()
    }

    /// Largest variable index occurring in the polynomial.
    pub fn max_var(&self) -> usize {
        self.coeffs.keys().map(Word::max_var).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.coeffs.keys().map(Word::len);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn homogeneous_part(&self, m: usize) -> Self {
        NCPoly {
            coeffs: self.coeffs.iter().filter(|(w, _)| w.len() == m).map(|(w, c)| (w.clone(), c.clone())).collect(),
            mode: self.mode,
        }
    }

    /// Keeps only words of length `<= d`.
    pub fn truncate(&self, d: usize) -> Self {
        NCPoly {
            coeffs: self.coeffs.iter().filter(|(w, _)| w.len() <= d).map(|(w, c)| (w.clone(), c.clone())).collect(),
            mode: self.mode,
        }
    }

    pub fn scale(&self, s: &R) -> Self {
        let mut out = Self::zero(self.mode);
        for (w, c) in &self.coeffs {
            out.add_term(w.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn map_coeffs<S: Coeff>(&self, f: impl Fn(&R) -> S) -> NCPoly<S> {
        let mut out = NCPoly::zero(self.mode);
        for (w, c) in &self.coeffs {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// The algebra involution: reverses words, stars letters and conjugates coefficients.
    pub fn involution(&self) -> Self {
        let mut out = NCPoly::zero(Mode::Involution);
        for (w, c) in &self.coeffs {
            out.add_term(w.involution(), c.conj());
        }
        out
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_mode(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_mode(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_mode(other)?;
        Ok(self * other)
    }

    fn check_same_mode(&self, other: &Self) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::ModeViolation(format!(
                "cannot combine {} and {} polynomials",
                self.mode.name(),
                other.mode.name()
            )));
        }
        Ok(())
    }

    /// Replaces every variable index `k` by `map(k)`.
    pub fn rename_vars(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut out = Self::zero(self.mode);
        for (w, c) in &self.coeffs {
            let w2 = Word(w.0.iter().map(|l| Letter { var: map(l.var), starred: l.starred }).collect());
            out.add_term(w2, c.clone());
        }
        out
    }
}

impl NCPoly<f64> {
    /// Drops coefficients with absolute value `<= tol`.
    pub fn cleanup(&self, tol: f64) -> Self {
        NCPoly {
            coeffs: self.coeffs.iter().filter(|(_, c)| c.abs() > tol).map(|(w, c)| (w.clone(), *c)).collect(),
            mode: self.mode,
        }
    }
}

impl<R: Coeff> NCPoly<R> {
    /// Largest coefficient difference over the union of supports.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (w, c) in &self.coeffs {
            worst = worst.max((c.clone() - other.coeff(w)).magnitude());
        }
        for (w, c) in &other.coeffs {
            if !self.coeffs.contains_key(w) {
                worst = worst.max(c.magnitude());
            }
        }
        worst
    }

    pub fn drop_small(&self, tol: f64) -> Self {
        NCPoly {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| c.magnitude() > tol)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
            mode: self.mode,
        }
    }
}

impl<'a, R: Coeff> Add for &'a NCPoly<R> {
    type Output = NCPoly<R>;
    fn add(self, rhs: Self) -> NCPoly<R> {
        let mut out = self.clone();
        out.mode = self.mode.join(rhs.mode);
        for (w, c) in &rhs.coeffs {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl<'a, R: Coeff> Sub for &'a NCPoly<R> {
    type Output = NCPoly<R>;
    fn sub(self, rhs: Self) -> NCPoly<R> {
        let mut out = self.clone();
        out.mode = self.mode.join(rhs.mode);
        for (w, c) in &rhs.coeffs {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

impl<'a, R: Coeff> Mul for &'a NCPoly<R> {
    type Output = NCPoly<R>;
    fn mul(self, rhs: Self) -> NCPoly<R> {
        let mut out = NCPoly::zero(self.mode.join(rhs.mode));
        for (u, a) in &self.coeffs {
            for (v, b) in &rhs.coeffs {
                out.add_term(u.concat(v), a.clone() * b.clone());
            }
        }
        out
    }
}

impl<'a, R: Coeff> Neg for &'a NCPoly<R> {
    type Output = NCPoly<R>;
    fn neg(self) -> NCPoly<R> {
        self.scale(&-R::one())
    }
}

impl<R: Coeff> Add for NCPoly<R> {
    type Output = NCPoly<R>;
    fn add(self, rhs: Self) -> NCPoly<R> {
        &self + &rhs
    }
}

impl<R: Coeff> Sub for NCPoly<R> {
    type Output = NCPoly<R>;
    fn sub(self, rhs: Self) -> NCPoly<R> {
        &self - &rhs
    }
}

impl<R: Coeff> Mul for NCPoly<R> {
    type Output = NCPoly<R>;
    fn mul(self, rhs: Self) -> NCPoly<R> {
        &self * &rhs
    }
}

impl<R: Coeff> fmt::Display for NCPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*{}", c.to_literal(), w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn product_of_variables() {
        let p = NCPoly::<f64>::var(1, Mode::Free) * NCPoly::var(2, Mode::Free);
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&w("x1 x2")), 1.0);
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn cancellation_prunes_exact_zeros() {
        let x1 = NCPoly::<f64>::var(1, Mode::Free);
        let z = &x1 - &x1;
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn checked_ops_reject_mixed_modes() {
        let a = NCPoly::<f64>::var(1, Mode::Free);
        let b = NCPoly::<f64>::var(1, Mode::Involution);
        assert!(a.checked_add(&b).is_err());
        assert!(a.checked_mul(&b).is_err());
        assert_eq!((&a * &b).mode(), Mode::Involution);
    }

    #[test]
    fn monomial_rejects_starred_in_free_mode() {
        assert!(NCPoly::<f64>::monomial(w("x1*"), 1.0, Mode::Free).is_err());
    }

    #[test]
    fn involution_reverses_and_conjugates() {
        use num_complex::Complex64;
        let p = NCPoly::from_terms(Mode::Involution, [(w("x1 x2*"), Complex64::new(1.0, 2.0))]);
        let q = p.involution();
        assert_eq!(q.coeff(&w("x2 x1*")), Complex64::new(1.0, -2.0));
        assert_eq!(q.involution(), p);
    }
}
