use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mateval::MatTuple;
use crate::oracle::{FreeMapOracle, Smoothness};
use crate::scalar::Field;

/// Extra nodes used when the map is not known to be a polynomial of degree ≤ D.
pub const OVERSAMPLE: usize = 8;
const SMOOTH_STEP_CAP: f64 = 0.5;

/// Node layout for extracting `t^m` coefficients of `t ↦ F(tX)`.
#[derive(Debug, Clone)]
pub struct Interpolation {
    pub nodes: Vec<f64>,
    /// `weights[m][j]`: the `t^m` coefficient is `Σ_j weights[m][j] F(t_j X)`.
    weights: DMatrix<f64>,
}

impl Interpolation {
    /// `count` Chebyshev nodes on `[-h, h]`.
    pub fn chebyshev(count: usize, h: f64) -> Result<Self> {
        if count == 0 || !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("interpolation needs nodes and a positive step (h={h})")));
        }
        let s: Vec<f64> = (0..count).map(|j| ((2 * j + 1) as f64 * PI / (2 * count) as f64).cos()).collect();
        // Vandermonde in the scaled variable s = t/h, inverted once.
        let v = DMatrix::from_fn(count, count, |j, k| s[j].powi(k as i32));
        let inv = v.try_inverse().ok_or_else(|| Error::RankDeficient("duplicate interpolation nodes".into()))?;
        let weights = DMatrix::from_fn(count, count, |m, j| inv[(m, j)] / h.powi(m as i32));
        Ok(Interpolation { nodes: s.iter().map(|x| x * h).collect(), weights })
    }

    pub fn max_degree(&self) -> usize {
        self.nodes.len() - 1
    }

    /// All coefficients `0..=max_degree` of `t ↦ F(tX)` from the node values.
    pub fn coefficients<T: Field>(&self, values: &[MatTuple<T>]) -> Result<Vec<MatTuple<T>>> {
        (0..self.nodes.len()).map(|m| self.coefficient(m, values)).collect()
    }

    pub fn coefficient<T: Field>(&self, m: usize, values: &[MatTuple<T>]) -> Result<MatTuple<T>> {
        let first = values.first().ok_or_else(|| Error::InvalidArgument("no node values".into()))?;
        let mut acc = MatTuple::zeros(first.g(), first.n());
        for (j, v) in values.iter().enumerate() {
            acc = acc.add(&v.scale(&T::from_real(self.weights[(m, j)])))?;
        }
        Ok(acc)
    }
}

/// Node count and step for degree bound `d` at a point of norm `norm`,
/// where `radius` is the distance to the domain boundary available along the ray.
pub fn default_plan(smoothness: Smoothness, d: usize, norm: f64, radius: f64) -> (usize, f64) {
    let (count, cap) = match smoothness {
        Smoothness::Polynomial(p) if p <= d => (d + 1, 1.0),
        _ => (d + 1 + OVERSAMPLE, SMOOTH_STEP_CAP / norm.max(1.0)),
    };
    let h = if norm > 0.0 { cap.min(radius / (2.0 * norm)) } else { cap };
    (count, h)
}

/// Values `F(t_j X)` of an arbitrary evaluator at the interpolation nodes.
pub fn node_values<T: Field>(
    eval: &dyn Fn(&MatTuple<T>) -> Result<MatTuple<T>>,
    plan: &Interpolation,
    x: &MatTuple<T>,
) -> Result<Vec<MatTuple<T>>> {
    plan.nodes.iter().map(|&t| eval(&x.scale(&T::from_real(t)))).collect()
}

/// `f_m(X)`: the `t^m` coefficient of `f(tX)` recovered from Chebyshev samples.
///
/// For polynomial oracles of degree ≤ `d` this uses `d + 1` nodes with
/// `h = min(1, δ/(2‖X‖))`; otherwise extra nodes and samples `tX` with
/// `‖tX‖ ≤ 1/2`. Pass `h` to override.
pub fn homogeneous_part_eval<T: Field>(
    f: &FreeMapOracle<T>,
    m: usize,
    x: &MatTuple<T>,
    d: usize,
    h: Option<f64>,
) -> Result<MatTuple<T>> {
    if m > d {
        return Err(Error::InvalidArgument(format!("part {m} above the degree bound {d}")));
    }
    let (count, h0) = default_plan(f.smoothness(), d, x.norm(), f.radius(x.n()));
    let plan = Interpolation::chebyshev(count, h.unwrap_or(h0))?;
    let values = node_values(&|y| f.eval(y), &plan, x)?;
    plan.coefficient(m, &values)
}
