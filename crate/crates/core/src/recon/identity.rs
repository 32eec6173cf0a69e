use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mateval::{eval_ncpoly, eval_standard, eval_tracepoly, frobenius, MatTuple};
use crate::ncalg::{Mode, NCPoly, TracePoly, Word};
use crate::scalar::{rational_from_f64, rational_to_f64, Coeff};

/// Largest `k` for which `S_{2k}` is expanded into its `(2k)!` terms.
pub const MAX_STANDARD_EXPANSION: usize = 5;

/// `S_{2k}(x_1, …, x_{2k}) = Σ_σ sgn(σ) x_σ(1) ⋯ x_σ(2k)`.
pub fn standard_polynomial<R: Coeff>(k: usize) -> Result<NCPoly<R>> {
    if k > MAX_STANDARD_EXPANSION {
        return Err(Error::InvalidArgument(format!(
            "S_{} has {}! terms; symbolic expansion is limited to k ≤ {MAX_STANDARD_EXPANSION}",
            2 * k,
            2 * k
        )));
    }
    let m = 2 * k;
    let mut p = NCPoly::zero(Mode::Free);
    let mut perm: Vec<usize> = (1..=m).collect();
    permute(&mut perm, 0, true, &mut |perm, even| {
        let c = if even { R::one() } else { -R::one() };
        p.add_term(Word::vars(perm), c);
    });
    Ok(p)
}

fn permute(v: &mut Vec<usize>, start: usize, even: bool, visit: &mut dyn FnMut(&[usize], bool)) {
    if start == v.len() {
        visit(v, even);
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permute(v, start + 1, if i == start { even } else { !even }, visit);
        v.swap(start, i);
    }
}

/// Polynomial whose vanishing on `M_n` is being tested.
#[derive(Debug, Clone)]
pub enum IdentityCandidate {
    Poly(NCPoly<f64>),
    Trace(TracePoly<f64>),
    /// `S_{2k}`, evaluated without expansion.
    Standard(usize),
}

impl IdentityCandidate {
    pub fn g(&self) -> usize {
        match self {
            IdentityCandidate::Poly(p) => p.max_var(),
            IdentityCandidate::Trace(p) => p.max_var(),
            IdentityCandidate::Standard(k) => 2 * k,
        }
        .max(1)
    }

    fn degree(&self) -> usize {
        match self {
            IdentityCandidate::Poly(p) => p.degree().unwrap_or(0),
            IdentityCandidate::Trace(p) => p.degree().unwrap_or(0),
            IdentityCandidate::Standard(k) => 2 * k,
        }
    }

    fn coefficient_mass(&self) -> f64 {
        match self {
            IdentityCandidate::Poly(p) => p.terms().map(|(_, c)| c.abs()).sum(),
            IdentityCandidate::Trace(p) => p.terms().map(|(_, c)| c.abs()).sum(),
            IdentityCandidate::Standard(k) => (1..=2 * k).map(|i| i as f64).product(),
        }
    }

    fn eval<R: Coeff>(&self, x: &MatTuple<R>, convert: &dyn Fn(f64) -> Result<R>) -> Result<DMatrix<R>> {
        match self {
            IdentityCandidate::Poly(p) => {
                let q = convert_poly(p, convert)?;
                eval_ncpoly(&q, x)
            }
            IdentityCandidate::Trace(p) => {
                for (_, c) in p.terms() {
                    convert(*c)?;
                }
                let q = p.map_coeffs(|c| convert(*c).unwrap_or_else(|_| R::zero()));
                eval_tracepoly(&q, x)
            }
            IdentityCandidate::Standard(k) => {
                if x.g() < 2 * k {
                    return Err(Error::IndexOutOfRange { index: 2 * k, g: x.g() });
                }
                Ok(eval_standard(&x.mats()[..2 * k], x.n()))
            }
        }
    }
}

fn convert_poly<R: Coeff>(p: &NCPoly<f64>, convert: &dyn Fn(f64) -> Result<R>) -> Result<NCPoly<R>> {
    let mut q = NCPoly::zero(p.mode());
    for (w, c) in p.terms() {
        q.add_term(w.clone(), convert(*c)?);
    }
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Identity,
    NonIdentity,
}

#[derive(Debug, Clone)]
pub struct IdentityOptions {
    pub trials: usize,
    pub seed: u64,
    /// Integer tuples and rational arithmetic instead of Gaussian floats.
    pub exact: bool,
    /// Entries of exact tuples are drawn from `[-bound, bound]`.
    pub entry_bound: i64,
    /// Relative tolerance in floating-point mode.
    pub tol: f64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        IdentityOptions { trials: 25, seed: 0, exact: false, entry_bound: 3, tol: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub verdict: Verdict,
    pub trials: usize,
    /// Largest residual seen; absolute in exact mode, relative otherwise.
    pub max_residual: f64,
    pub witness: Option<MatTuple<f64>>,
    pub witness_value: Option<DMatrix<f64>>,
}

/// Randomized test of whether `candidate` vanishes on `M_n`.
pub fn is_identity(candidate: &IdentityCandidate, n: usize, opts: &IdentityOptions) -> Result<IdentityReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("identity testing needs n ≥ 1".into()));
    }
    let g = candidate.g();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut max_residual: f64 = 0.0;
    for trial in 0..opts.trials {
        let (residual, failed, witness, value) = if opts.exact {
            let b = opts.entry_bound.max(1);
            let ints: Vec<DMatrix<i64>> =
                (0..g).map(|_| DMatrix::from_fn(n, n, |_, _| rng.random_range(-b..=b))).collect();
            let x = MatTuple::new(ints.iter().map(|m| m.map(|v| BigRational::from_integer(v.into()))).collect())?;
            let y = candidate.eval(&x, &|c| rational_from_f64(c).ok_or(Error::NonFinite))?;
            let failed = y.iter().any(|v| !v.is_zero());
            let value = y.map(|v| rational_to_f64(&v));
            let residual = value.iter().map(|v| v.abs()).fold(0.0, f64::max);
            (residual, failed, MatTuple::new(ints.iter().map(|m| m.map(|v| v as f64)).collect())?, value)
        } else {
            let x = MatTuple::<f64>::random_normal(g, n, &mut rng);
            let y = candidate.eval(&x, &|c| Ok(c))?;
            let xmax = x.mats().iter().map(frobenius).fold(0.0, f64::max);
            let scale = 1.0 + candidate.coefficient_mass() * xmax.powi(candidate.degree() as i32);
            let residual = frobenius(&y) / scale;
            (residual, !(residual <= opts.tol), x, y)
        };
        max_residual = max_residual.max(residual);
        if failed {
            return Ok(IdentityReport {
                verdict: Verdict::NonIdentity,
                trials: trial + 1,
                max_residual,
                witness: Some(witness),
                witness_value: Some(value),
            });
        }
    }
    Ok(IdentityReport { verdict: Verdict::Identity, trials: opts.trials, max_residual, witness: None, witness_value: None })
}
