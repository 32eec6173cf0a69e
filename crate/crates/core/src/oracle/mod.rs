//! Black-box free maps: level-indexed evaluators with metadata, the built-in
//! example maps, and numerical checkers for the free-map axioms and the
//! derivative identities.

mod builtin;
mod check;
mod deriv;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mateval::{eval_ncpoly, Group, MatTuple};
use crate::ncalg::{Mode, NCPoly};
use crate::scalar::Field;

pub use builtin::{
    nonuniform_args, nonuniform_degree, nonuniform_h, nonuniform_witness, nonuniform_witness_as_printed,
    nonuniform_z, nonuniform_z_poly, trace_times_identity, Builtin, DEFAULT_SMOOTH_TERMS,
};
pub use check::{
    check_commutator_identity, check_direct_sums, check_similarity, check_triangular_identity, CheckReport, Witness,
};
pub use deriv::{directional_derivative, exact_directional_derivative, DerivativeEstimate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothness {
    Continuous,
    Ck(usize),
    Smooth,
    Analytic,
    Polynomial(usize),
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothness::Continuous => write!(f, "continuous"),
            Smoothness::Ck(k) => write!(f, "C{}", k),
            Smoothness::Smooth => write!(f, "smooth"),
            Smoothness::Analytic => write!(f, "analytic"),
            Smoothness::Polynomial(d) => write!(f, "polynomial({})", d),
        }
    }
}

pub type Evaluator<T> = Arc<dyn Fn(&MatTuple<T>) -> Result<MatTuple<T>> + Send + Sync>;

/// A free map given by its levelwise evaluators `f[n]`.
///
/// The metadata is descriptive; the checkers in this module verify it.
#[derive(Clone)]
pub struct FreeMapOracle<T: Field> {
    name: String,
    g: usize,
    g_out: usize,
    group: Group,
    smoothness: Smoothness,
    default_radius: f64,
    radii: BTreeMap<usize, f64>,
    max_level: Option<usize>,
    polys: Option<Vec<NCPoly<T>>>,
    evaluator: Evaluator<T>,
}

impl<T: Field> fmt::Debug for FreeMapOracle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FreeMapOracle")
            .field("name", &self.name)
            .field("g", &self.g)
            .field("g_out", &self.g_out)
            .field("group", &self.group)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl<T: Field> FreeMapOracle<T> {
    pub fn from_fn(
        name: impl Into<String>,
        g: usize,
        g_out: usize,
        group: Group,
        smoothness: Smoothness,
        evaluator: impl Fn(&MatTuple<T>) -> Result<MatTuple<T>> + Send + Sync + 'static,
    ) -> Self {
        FreeMapOracle {
            name: name.into(),
            g,
            g_out,
            group,
            smoothness,
            default_radius: f64::INFINITY,
            radii: BTreeMap::new(),
            max_level: None,
            polys: None,
            evaluator: Arc::new(evaluator),
        }
    }

    /// Polynomial map `X ↦ (p_1(X), …, p_{g'}(X))`; the group is GL for
    /// involution-free input and O (real) / U (complex) otherwise.
    pub fn from_ncpolys(polys: Vec<NCPoly<T>>, g: usize) -> Self {
        let mode = polys.iter().fold(Mode::Free, |m, p| m.join(p.mode()));
        let group = match (mode, T::IS_COMPLEX) {
            (Mode::Free, _) => Group::GL,
            (Mode::Involution, false) => Group::O,
            (Mode::Involution, true) => Group::U,
        };
        let g = g.max(polys.iter().map(NCPoly::max_var).max().unwrap_or(0));
        let degree = polys.iter().filter_map(NCPoly::degree).max().unwrap_or(0);
        let name = if polys.len() == 1 { format!("poly({})", polys[0]) } else { format!("poly[{}]", polys.len()) };
        let shared = polys.clone();
        let mut o = Self::from_fn(name, g, polys.len(), group, Smoothness::Polynomial(degree), move |x| {
            let mats = shared.iter().map(|p| eval_ncpoly(p, x)).collect::<Result<Vec<_>>>()?;
            MatTuple::new(mats)
        });
        o.polys = Some(polys);
        o
    }

    pub fn from_ncpoly(p: NCPoly<T>) -> Self {
        let g = p.max_var().max(1);
        Self::from_ncpolys(vec![p], g)
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.default_radius = radius;
        self
    }

    pub fn with_level_radius(mut self, n: usize, radius: f64) -> Self {
        self.radii.insert(n, radius);
        self
    }

    pub fn with_max_level(mut self, n: usize) -> Self {
        self.max_level = Some(n);
        self
    }

    pub fn with_group(mut self, group: Group) -> Self {
        self.group = group;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn g_out(&self) -> usize {
        self.g_out
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn max_level(&self) -> Option<usize> {
        self.max_level
    }

    /// Symbolic form, when the oracle was built from polynomials.
    pub fn polys(&self) -> Option<&[NCPoly<T>]> {
        self.polys.as_deref()
    }

    /// Domain radius `δ_n` at level `n`.
    pub fn radius(&self, n: usize) -> f64 {
        self.radii.get(&n).copied().unwrap_or(self.default_radius)
    }

    /// Evaluates `f[n](X)`; points with `‖X‖ ≥ δ_n` are rejected.
    pub fn eval(&self, x: &MatTuple<T>) -> Result<MatTuple<T>> {
        if x.g() != self.g {
            return Err(Error::SizeMismatch(format!("{} expects {} arguments, got {}", self.name, self.g, x.g())));
        }
        let n = x.n();
        if let Some(max) = self.max_level {
            if n > max {
                return Err(Error::InvalidArgument(format!("{} is only defined up to level {}", self.name, max)));
            }
        }
        let radius = self.radius(n);
        let norm = x.norm();
        if norm >= radius {
            return Err(Error::OutOfDomain { norm, radius });
        }
        let y = (self.evaluator)(x)?;
        if !y.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(y)
    }

    /// Convenience for maps with a single output.
    pub fn eval1(&self, x: &MatTuple<T>) -> Result<nalgebra::DMatrix<T>> {
        Ok(self.eval(x)?.into_mats().swap_remove(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mateval::matrix_unit;
    use crate::ncalg::Word;
    use nalgebra::DMatrix;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn identity_oracle() {
        let f = FreeMapOracle::from_ncpoly(NCPoly::<f64>::var(1, Mode::Free));
        let x = MatTuple::single(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(f.eval(&x).unwrap(), x);
        assert_eq!(f.group(), Group::GL);
        assert_eq!(f.smoothness(), Smoothness::Polynomial(1));
    }

    #[test]
    fn xxt_oracle_at_unit() {
        let p = NCPoly::from_terms(Mode::Involution, [(w("x1 x1*"), 1.0)]);
        let f = FreeMapOracle::from_ncpoly(p);
        assert_eq!(f.group(), Group::O);
        let y = f.eval1(&MatTuple::single(matrix_unit(2, 1, 2))).unwrap();
        assert_eq!(y, matrix_unit(2, 1, 1));
    }

    #[test]
    fn commutator_vanishes_on_scalars() {
        let p = NCPoly::from_terms(Mode::Free, [(w("x1 x2"), 1.0), (w("x2 x1"), -1.0)]);
        let f = FreeMapOracle::from_ncpolys(vec![p], 2);
        for (a, b) in [(1.5, -2.0), (0.3, 7.0)] {
            let x = MatTuple::new(vec![DMatrix::from_element(1, 1, a), DMatrix::from_element(1, 1, b)]).unwrap();
            assert_eq!(f.eval1(&x).unwrap()[(0, 0)], 0.0);
        }
    }

    #[test]
    fn domain_and_arity_errors() {
        let f = FreeMapOracle::from_ncpoly(NCPoly::<f64>::var(1, Mode::Free)).with_radius(1.0);
        let big = MatTuple::single(DMatrix::from_element(1, 1, 2.0));
        assert!(matches!(f.eval(&big), Err(Error::OutOfDomain { .. })));
        assert!(f.eval(&MatTuple::zeros(2, 1)).is_err());
    }
}
