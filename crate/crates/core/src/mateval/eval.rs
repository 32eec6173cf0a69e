use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ncalg::{GenPoly, Letter, NCPoly, TracePoly, Word};
use crate::scalar::Coeff;

use super::{adjoint, trace, MatTuple};

fn letter_value<R: Coeff>(l: &Letter, x: &MatTuple<R>) -> Result<DMatrix<R>> {
    if l.var > x.g() {
        return Err(Error::IndexOutOfRange { index: l.var, g: x.g() });
    }
    let m = x.get(l.var - 1);
    Ok(if l.starred { adjoint(m) } else { m.clone() })
}

/// Product of the (adjoint-)components in word order; the unit word gives `I_n`.
pub fn eval_word<R: Coeff>(w: &Word, x: &MatTuple<R>) -> Result<DMatrix<R>> {
    let n = x.n();
    let mut acc = DMatrix::identity(n, n);
    for l in w.letters() {
        acc = acc * letter_value(l, x)?;
    }
    Ok(acc)
}

/// Evaluates many words sharing prefixes, caching prefix products.
struct PrefixEvaluator<'a, R: Coeff> {
    x: &'a MatTuple<R>,
    letters: Vec<Option<DMatrix<R>>>,
    cache: HashMap<Word, DMatrix<R>>,
}

impl<'a, R: Coeff> PrefixEvaluator<'a, R> {
    fn new(x: &'a MatTuple<R>) -> Self {
        let n = x.n();
        let mut cache = HashMap::new();
        cache.insert(Word::unit(), DMatrix::identity(n, n));
        PrefixEvaluator { x, letters: vec![None; 2 * x.g()], cache }
    }

    fn letter(&mut self, l: &Letter) -> Result<&DMatrix<R>> {
        if l.var > self.x.g() {
            return Err(Error::IndexOutOfRange { index: l.var, g: self.x.g() });
        }
        let slot = 2 * (l.var - 1) + l.starred as usize;
        if self.letters[slot].is_none() {
            self.letters[slot] = Some(letter_value(l, self.x)?);
        }
        Ok(self.letters[slot].as_ref().unwrap())
    }

    fn eval(&mut self, w: &Word) -> Result<&DMatrix<R>> {
        if !self.cache.contains_key(w) {
            let mut start = w.len();
            while start > 0 && !self.cache.contains_key(&Word(w.0[..start].to_vec())) {
                start -= 1;
            }
            let mut acc = self.cache[&Word(w.0[..start].to_vec())].clone();
            for len in start + 1..=w.len() {
                acc = acc * self.letter(&w.0[len - 1])?;
                self.cache.insert(Word(w.0[..len].to_vec()), acc.clone());
            }
        }
        Ok(&self.cache[w])
    }
}

pub fn eval_ncpoly<R: Coeff>(p: &NCPoly<R>, x: &MatTuple<R>) -> Result<DMatrix<R>> {
    let n = x.n();
    let mut ev = PrefixEvaluator::new(x);
    let mut out = DMatrix::zeros(n, n);
    for (w, c) in p.terms() {
        out += ev.eval(w)? * c.clone();
    }
    Ok(out)
}

/// Exact directional derivative `d/dt p(X + tH)` at `t = 0`.
pub fn eval_ncpoly_derivative<R: Coeff>(p: &NCPoly<R>, x: &MatTuple<R>, h: &MatTuple<R>) -> Result<DMatrix<R>> {
    if x.g() != h.g() || x.n() != h.n() {
        return Err(Error::SizeMismatch("point and direction must have the same shape".into()));
    }
    let n = x.n();
    let mut out = DMatrix::zeros(n, n);
    for (w, c) in p.terms() {
        let letters = w.letters();
        let len = letters.len();
        let xs: Vec<DMatrix<R>> = letters.iter().map(|l| letter_value(l, x)).collect::<Result<_>>()?;
        let mut suffix = vec![DMatrix::identity(n, n); len + 1];
        for i in (0..len).rev() {
            suffix[i] = &xs[i] * &suffix[i + 1];
        }
        let mut prefix = DMatrix::identity(n, n);
        for i in 0..len {
            let dh = letter_value(&letters[i], h)?;
            out += &prefix * dh * &suffix[i + 1] * c.clone();
            prefix = prefix * &xs[i];
        }
    }
    Ok(out)
}

/// Trace factors are evaluated as scalars multiplying the tail.
pub fn eval_tracepoly<R: Coeff>(p: &TracePoly<R>, x: &MatTuple<R>) -> Result<DMatrix<R>> {
    let n = x.n();
    let mut ev = PrefixEvaluator::new(x);
    let mut out = DMatrix::zeros(n, n);
    for (m, c) in p.terms() {
        let mut scalar = c.clone();
        for w in m.pure() {
            scalar *= trace(ev.eval(w)?);
        }
        out += ev.eval(m.tail())?.clone() * scalar;
    }
    Ok(out)
}

/// `a ⊗ I_s`: every entry `a_ij` becomes the block `a_ij · I_s`.
pub fn kron_identity<R: Coeff>(a: &DMatrix<R>, s: usize) -> DMatrix<R> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(n * s, n * s);
    for i in 0..n {
        for j in 0..a.ncols() {
            if a[(i, j)].is_zero() {
                continue;
            }
            for k in 0..s {
                out[(i * s + k, j * s + k)] = a[(i, j)].clone();
            }
        }
    }
    out
}

/// Evaluates a generalized polynomial with size-`n` coefficients at a tuple of
/// size `n·s`; each coefficient `a` acts as `a ⊗ I_s`.
pub fn eval_genpoly<R: Coeff>(p: &GenPoly<R>, x: &MatTuple<R>) -> Result<DMatrix<R>> {
    let n = p.n();
    let size = x.n();
    if n == 0 || size % n != 0 {
        return Err(Error::SizeMismatch(format!("evaluation size {} is not a multiple of {}", size, n)));
    }
    let s = size / n;
    let mut out = DMatrix::zeros(size, size);
    for t in p.terms() {
        let mut acc = kron_identity(&t.mats[0], s);
        for (l, a) in t.letters.iter().zip(&t.mats[1..]) {
            acc = acc * letter_value(l, x)? * kron_identity(a, s);
        }
        out += acc;
    }
    Ok(out)
}

/// Standard polynomial `S_m(a_1, …, a_m) = Σ_σ sgn(σ) a_σ(1)⋯a_σ(m)` evaluated
/// by expansion along the first factor, memoized over index subsets
/// (`2^m·m` products instead of `m!·m`).
pub fn eval_standard<R: Coeff>(mats: &[DMatrix<R>], n: usize) -> DMatrix<R> {
    let m = mats.len();
    assert!(m < usize::BITS as usize, "too many arguments for the standard polynomial");
    let mut table: Vec<Option<DMatrix<R>>> = vec![None; 1 << m];
    table[0] = Some(DMatrix::identity(n, n));
    let mut order: Vec<usize> = (1..(1usize << m)).collect();
    order.sort_by_key(|s| s.count_ones());
    for subset in order {
        let mut acc = DMatrix::zeros(n, n);
        let mut pos = 0;
        for i in 0..m {
            if subset & (1 << i) == 0 {
                continue;
            }
            let rest = table[subset & !(1 << i)].as_ref().expect("smaller subsets are filled first");
            let term = &mats[i] * rest;
            if pos % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
            pos += 1;
        }
        table[subset] = Some(acc);
    }
    table.pop().flatten().unwrap_or_else(|| DMatrix::identity(n, n))
}
