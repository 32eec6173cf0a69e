//! Degree-graded truncated power series in noncommuting variables.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Coeff;

use super::ncpoly::NCPoly;
use super::word::{Letter, Mode, Word};

/// `Σ_{m=0}^{D} f_m` with `f_m` homogeneous of degree `m`, in `g` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries<R> {
    g: usize,
    mode: Mode,
    parts: Vec<NCPoly<R>>,
}

impl<R: Coeff> FormalSeries<R> {
    pub fn zero(g: usize, mode: Mode, order: usize) -> Self {
        FormalSeries { g, mode, parts: vec![NCPoly::zero(mode); order + 1] }
    }

    /// Splits `p` into homogeneous parts, dropping everything above `order`.
    pub fn from_poly(p: &NCPoly<R>, g: usize, order: usize) -> Self {
        let mode = p.mode();
        let mut s = Self::zero(g, mode, order);
        for (w, c) in p.terms() {
            if w.len() <= order {
                s.parts[w.len()].add_term(w.clone(), c.clone());
            }
        }
        s
    }

    /// Builds a series from explicit parts; part `m` must be homogeneous of degree `m`.
    pub fn from_parts(g: usize, mode: Mode, parts: Vec<NCPoly<R>>) -> Result<Self> {
        for (m, p) in parts.iter().enumerate() {
            if p.terms().any(|(w, _)| w.len() != m) {
                return Err(Error::InvalidArgument(format!("part {m} is not homogeneous of degree {m}")));
            }
        }
        let mode = parts.iter().fold(mode, |acc, p| acc.join(p.mode()));
        if parts.is_empty() {
            return Err(Error::InvalidArgument("a series needs at least the constant part".into()));
        }
        Ok(FormalSeries { g, mode, parts })
    }

    /// The series of the variable `x_k`.
    pub fn variable(k: usize, g: usize, mode: Mode, order: usize) -> Self {
        Self::from_poly(&NCPoly::var(k, mode), g, order)
    }

    /// `(x_1, …, x_g)`.
    pub fn identity_tuple(g: usize, mode: Mode, order: usize) -> Vec<Self> {
        (1..=g).map(|k| Self::variable(k, g, mode, order)).collect()
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Truncation order `D`.
    pub fn order(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn parts(&self) -> &[NCPoly<R>] {
        &self.parts
    }

    pub fn part(&self, m: usize) -> &NCPoly<R> {
        &self.parts[m]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(NCPoly::is_zero)
    }

    pub fn to_poly(&self) -> NCPoly<R> {
        let mut out = NCPoly::zero(self.mode);
        for p in &self.parts {
            out = &out + p;
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut parts: Vec<NCPoly<R>> = self.parts.iter().take(order + 1).cloned().collect();
        while parts.len() < order + 1 {
            parts.push(NCPoly::zero(self.mode));
        }
        FormalSeries { g: self.g, mode: self.mode, parts }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let parts = (0..=order).map(|m| &self.parts[m] + &other.parts[m]).collect();
        FormalSeries { g: self.g.max(other.g), mode: self.mode.join(other.mode), parts }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let parts = (0..=order).map(|m| &self.parts[m] - &other.parts[m]).collect();
        FormalSeries { g: self.g.max(other.g), mode: self.mode.join(other.mode), parts }
    }

    pub fn scale(&self, s: &R) -> Self {
        FormalSeries { g: self.g, mode: self.mode, parts: self.parts.iter().map(|p| p.scale(s)).collect() }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mode = self.mode.join(other.mode);
        let mut parts = vec![NCPoly::zero(mode); order + 1];
        for i in 0..=order {
            if self.parts[i].is_zero() {
                continue;
            }
            for j in 0..=(order - i) {
                if other.parts[j].is_zero() {
                    continue;
                }
                parts[i + j] = &parts[i + j] + &(&self.parts[i] * &other.parts[j]);
            }
        }
        FormalSeries { g: self.g.max(other.g), mode, parts }
    }

    pub fn involution(&self) -> Self {
        FormalSeries {
            g: self.g,
            mode: Mode::Involution,
            parts: self.parts.iter().map(NCPoly::involution).collect(),
        }
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let order = self.order().min(other.order());
        (0..=order).map(|m| self.parts[m].max_coeff_diff(&other.parts[m])).fold(0.0, f64::max)
    }

    /// Substitutes `subs[k-1]` for `x_k` (and its involution for `x_k^t`).
    ///
    /// The result is truncated at the smallest order among `self` and `subs`.
    pub fn compose(&self, subs: &[FormalSeries<R>]) -> Result<Self> {
        for (i, s) in subs.iter().enumerate() {
            if !s.parts[0].is_zero() {
                return Err(Error::NonzeroConstant(i + 1));
            }
        }
        let needed = self.parts.iter().map(NCPoly::max_var).max().unwrap_or(0);
        if needed > subs.len() {
            return Err(Error::IndexOutOfRange { index: needed, g: subs.len() });
        }
        let order = subs.iter().map(FormalSeries::order).fold(self.order(), usize::min);
        let g = subs.iter().map(|s| s.g).max().unwrap_or(self.g);
        let inner_mode = subs.iter().fold(Mode::Free, |acc, s| acc.join(s.mode));
        let uses_star = self.mode.has_involution() && self.parts.iter().any(|p| p.terms().any(|(w, _)| w.has_starred()));
        let mode = if uses_star { Mode::Involution } else { inner_mode };

        let subs: Vec<FormalSeries<R>> = subs.iter().map(|s| s.truncate(order)).collect();
        let starred: Vec<Option<FormalSeries<R>>> =
            subs.iter().map(|s| if uses_star { Some(s.involution()) } else { None }).collect();
        let image = |l: &Letter| -> &FormalSeries<R> {
            if l.starred {
                starred[l.var - 1].as_ref().expect("involution images computed for starred letters")
            } else {
                &subs[l.var - 1]
            }
        };

        let mut one = FormalSeries::zero(g, mode, order);
        one.parts[0] = NCPoly::one(mode);
        let mut cache: HashMap<Word, FormalSeries<R>> = HashMap::new();
        cache.insert(Word::unit(), one);
        let mut out = FormalSeries::zero(g, mode, order);
        for part in self.parts.iter().take(order + 1) {
            for (w, c) in part.terms() {
                for len in 1..=w.len() {
                    let prefix = Word(w.0[..len].to_vec());
                    if cache.contains_key(&prefix) {
                        continue;
                    }
                    let shorter = Word(w.0[..len - 1].to_vec());
                    let value = cache[&shorter].mul(image(&w.0[len - 1]));
                    cache.insert(prefix, value);
                }
                out = out.add(&cache[w].scale(c));
            }
        }
        out.mode = mode;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn poly(mode: Mode, terms: &[(&str, f64)]) -> NCPoly<f64> {
        NCPoly::from_terms(mode, terms.iter().map(|(s, c)| (w(s), *c)))
    }

    #[test]
    fn identity_outer_map() {
        let g = FormalSeries::from_poly(&poly(Mode::Free, &[("x1", 1.0), ("x1 x1", 1.0)]), 1, 4);
        let f = FormalSeries::variable(1, 1, Mode::Free, 4);
        assert_eq!(f.compose(&[g.clone()]).unwrap(), g);
    }

    #[test]
    fn square_of_shifted_variable() {
        let g = FormalSeries::from_poly(&poly(Mode::Free, &[("x1", 1.0), ("x1 x1", 1.0)]), 1, 3);
        let f = FormalSeries::from_poly(&poly(Mode::Free, &[("x1 x1", 1.0)]), 1, 3);
        let h = f.compose(&[g]).unwrap();
        let expect = FormalSeries::from_poly(&poly(Mode::Free, &[("x1 x1", 1.0), ("x1 x1 x1", 2.0)]), 1, 3);
        assert_eq!(h, expect);
    }

    #[test]
    fn starred_letters_receive_the_involuted_series() {
        let g = FormalSeries::from_poly(&poly(Mode::Free, &[("x1", 1.0), ("x1 x2", 1.0)]), 2, 3);
        let f = FormalSeries::from_poly(&poly(Mode::Involution, &[("x1*", 1.0)]), 1, 3);
        let h = f.compose(&[g]).unwrap();
        let expect = FormalSeries::from_poly(&poly(Mode::Involution, &[("x1*", 1.0), ("x2* x1*", 1.0)]), 2, 3);
        assert_eq!(h, expect);
    }

    #[test]
    fn nonzero_constant_rejected() {
        let g = FormalSeries::from_poly(&poly(Mode::Free, &[("1", 1.0), ("x1", 1.0)]), 1, 3);
        let f = FormalSeries::variable(1, 1, Mode::Free, 3);
        assert_eq!(f.compose(&[g]), Err(Error::NonzeroConstant(1)));
    }

    #[test]
    fn truncates_to_smallest_order() {
        let g = FormalSeries::variable(1, 1, Mode::Free, 2);
        let f = FormalSeries::from_poly(&poly(Mode::Free, &[("x1 x1 x1", 1.0), ("x1", 1.0)]), 1, 5);
        let h = f.compose(&[g]).unwrap();
        assert_eq!(h.order(), 2);
        assert_eq!(h.to_poly(), poly(Mode::Free, &[("x1", 1.0)]));
    }
}
