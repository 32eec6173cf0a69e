use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mateval::MatTuple;
use crate::ncalg::{Mode, NCPoly, Word};
use crate::scalar::Coeff;

/// Coefficients with magnitude below this are dropped from extracted polynomials.
pub const MATENOTE_CLEANUP: f64 = 1e-9;

/// Evaluation point reading the coefficient of `word` from a homogeneous map.
///
/// Letter `i` of the word contributes the shift unit `e_{i,i+1}` to its
/// variable, or `e_{i+1,i}` if it is starred; the coefficient is the
/// `(1, m+1)` entry of the value.
#[derive(Debug, Clone)]
pub struct MatenotePlan<R: Coeff> {
    pub word: Word,
    pub level: usize,
    pub tuple: MatTuple<R>,
}

impl<R: Coeff> MatenotePlan<R> {
    pub fn new(word: &Word, g: usize, level: usize) -> Result<Self> {
        let m = word.len();
        if level < m + 1 {
            return Err(Error::InvalidArgument(format!("a word of degree {m} needs level ≥ {}", m + 1)));
        }
        if word.max_var() > g {
            return Err(Error::IndexOutOfRange { index: word.max_var(), g });
        }
        let mut mats = vec![DMatrix::zeros(level, level); g];
        for (i, l) in word.letters().iter().enumerate() {
            let (r, c) = if l.starred { (i + 1, i) } else { (i, i + 1) };
            mats[l.var - 1][(r, c)] += R::one();
        }
        Ok(MatenotePlan { word: word.clone(), level, tuple: MatTuple::new(mats)? })
    }

    /// Zero-based `(row, col)` of the entry holding the coefficient.
    pub fn entry(&self) -> (usize, usize) {
        (0, self.word.len())
    }
}

/// Homogeneous degree-`m` polynomials (one per output) of a map known to be
/// homogeneous of degree `m`, read off at level `m + 1`.
pub fn matenote_extract<R: Coeff>(
    f_hom: &dyn Fn(&MatTuple<R>) -> Result<MatTuple<R>>,
    g: usize,
    m: usize,
    mode: Mode,
) -> Result<Vec<NCPoly<R>>> {
    matenote_extract_at_level(f_hom, g, m, mode, m + 1, MATENOTE_CLEANUP)
}

/// As [`matenote_extract`] at any level `≥ m + 1` with an explicit cleanup threshold.
pub fn matenote_extract_at_level<R: Coeff>(
    f_hom: &dyn Fn(&MatTuple<R>) -> Result<MatTuple<R>>,
    g: usize,
    m: usize,
    mode: Mode,
    level: usize,
    cleanup: f64,
) -> Result<Vec<NCPoly<R>>> {
    let mut out: Vec<NCPoly<R>> = Vec::new();
    for w in Word::enumerate(g, mode, m) {
        let plan = MatenotePlan::new(&w, g, level)?;
        let y = f_hom(&plan.tuple)?;
        if out.is_empty() {
            out = vec![NCPoly::zero(mode); y.g()];
        }
        let (r, c) = plan.entry();
        for (k, v) in y.mats().iter().enumerate() {
            let coeff = v[(r, c)].clone();
            if coeff.magnitude() >= cleanup {
                out[k].add_term(w.clone(), coeff);
            }
        }
    }
    Ok(out)
}
