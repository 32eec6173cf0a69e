use std::fmt;

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};
use crate::mateval::MatTuple;
use crate::oracle::{directional_derivative, exact_directional_derivative, FreeMapOracle};
use crate::scalar::Field;

#[derive(Debug, Clone)]
pub struct NewtonOptions {
    pub tol: f64,
    pub maxit: usize,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-10, maxit: 50, max_halvings: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonStep {
    pub residual: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct NewtonTrace<T: Field> {
    /// Residual before each step and the length of the step taken; the last
    /// entry carries the final residual and a zero step.
    pub iterates: Vec<NewtonStep>,
    pub converged: bool,
    pub x: MatTuple<T>,
    /// Condition number of the last Jacobian.
    pub condition: f64,
    /// `σ_min(J(X*)) / (2·L)` with `L` a secant estimate of the Lipschitz
    /// constant of the Jacobian between the start and the solution.
    pub trust_radius: f64,
}

impl<T: Field> NewtonTrace<T> {
    pub fn final_residual(&self) -> f64 {
        self.iterates.last().map_or(f64::INFINITY, |s| s.residual)
    }

    pub fn into_result(self) -> Result<NewtonTrace<T>> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { iterations: self.iterates.len().saturating_sub(1), residual: self.final_residual() })
        }
    }
}

impl<T: Field> fmt::Display for NewtonTrace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.iterates.iter().enumerate() {
            writeln!(f, "iter={} res={:.3e} step={:.3e}", i, s.residual, s.step)?;
        }
        Ok(())
    }
}

type EvalFn<'a, T> = dyn Fn(&MatTuple<T>) -> Result<MatTuple<T>> + 'a;
type DerivFn<'a, T> = dyn Fn(&MatTuple<T>, &MatTuple<T>) -> Result<MatTuple<T>> + 'a;

/// Derivative along `h`: exact for polynomial oracles, Richardson-extrapolated
/// central differences otherwise.
pub fn derivative<T: Field>(f: &FreeMapOracle<T>, x: &MatTuple<T>, h: &MatTuple<T>) -> Result<MatTuple<T>> {
    match exact_directional_derivative(f, x, h) {
        Some(d) => d,
        None => Ok(directional_derivative(f, x, h, 1, None, 3)?.value),
    }
}

/// Real Jacobian of `deriv(x, ·)` in the coordinates of [`MatTuple::to_real_vec`].
pub fn real_jacobian<T: Field>(deriv: &DerivFn<'_, T>, x: &MatTuple<T>) -> Result<DMatrix<f64>> {
    let (g, n) = (x.g(), x.n());
    let dim = x.to_real_vec().len();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        cols.push(deriv(x, &MatTuple::from_real_vec(g, n, &e))?.to_real_vec());
    }
    let rows = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, dim, |r, c| cols[c][r]))
}

fn extreme_singular_values(j: &DMatrix<f64>) -> (f64, f64) {
    let s = SVD::new(j.clone(), false, false).singular_values;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    (min, max)
}

pub(crate) fn newton_solve<T: Field>(
    eval: &EvalFn<'_, T>,
    deriv: &DerivFn<'_, T>,
    y: &MatTuple<T>,
    x0: MatTuple<T>,
    opts: &NewtonOptions,
) -> Result<NewtonTrace<T>> {
    let (g, n) = (x0.g(), x0.n());
    let residual_at = |x: &MatTuple<T>| -> Result<(MatTuple<T>, f64)> {
        let r = eval(x)?.sub(y)?;
        let norm = r.norm();
        Ok((r, norm))
    };
    let start = x0.clone();
    let j0 = real_jacobian(deriv, &start)?;
    let mut x = x0;
    let (mut r, mut rn) = residual_at(&x)?;
    let mut iterates = Vec::new();
    let mut condition = f64::NAN;
    let mut jac = j0.clone();
    for _ in 0..opts.maxit {
        if rn < opts.tol {
            break;
        }
        if iterates.len() > 0 {
            jac = real_jacobian(deriv, &x)?;
        }
        let (smin, smax) = extreme_singular_values(&jac);
        condition = smax / smin;
        if !(smin > 1e-14 * smax) {
            return Err(Error::Singular(condition));
        }
        let rhs = DVector::from_vec(r.to_real_vec());
        let delta = jac.clone().svd(true, true).solve(&rhs, 0.0).map_err(|e| Error::RankDeficient(e.to_string()))?;
        let step = MatTuple::<T>::from_real_vec(g, n, delta.as_slice());
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = x.sub(&step.scale(&T::from_real(lambda)))?;
            if let Ok((tr, tn)) = residual_at(&trial) {
                if tn < rn {
                    accepted = Some((trial, tr, tn));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((nx, nr, nn)) => {
                iterates.push(NewtonStep { residual: rn, step: lambda * step.norm() });
                x = nx;
                r = nr;
                rn = nn;
            }
            None => break,
        }
    }
    iterates.push(NewtonStep { residual: rn, step: 0.0 });
    let jac_final = real_jacobian(deriv, &x)?;
    let (smin, smax) = extreme_singular_values(&jac_final);
    if condition.is_nan() {
        condition = smax / smin;
    }
    let dist = x.sub(&start)?.norm();
    let lip = if dist > 0.0 { (&jac_final - &j0).norm() / dist } else { 0.0 };
    let trust_radius = if lip > 0.0 { smin / (2.0 * lip) } else { f64::INFINITY };
    Ok(NewtonTrace { iterates, converged: rn < opts.tol, x, condition, trust_radius })
}

/// Solves `f(X) = Y` at the level of `Y` by damped Newton iteration.
pub fn newton_invert<T: Field>(
    f: &FreeMapOracle<T>,
    y: &MatTuple<T>,
    x0: Option<&MatTuple<T>>,
    opts: &NewtonOptions,
) -> Result<NewtonTrace<T>> {
    if f.g() != f.g_out() {
        return Err(Error::SizeMismatch(format!("inversion needs g = g' (got {} and {})", f.g(), f.g_out())));
    }
    if y.g() != f.g_out() {
        return Err(Error::SizeMismatch(format!("target has {} components, map has {}", y.g(), f.g_out())));
    }
    let x0 = match x0 {
        Some(x) => x.clone(),
        None => MatTuple::zeros(f.g(), y.n()),
    };
    newton_solve(&|x| f.eval(x), &|x, h| derivative(f, x, h), y, x0, opts)
}

/// Solves `f(x̂, y) = 0` for `y` where `f` takes `x̂.g() + g'` arguments.
pub fn implicit_numeric<T: Field>(
    f: &FreeMapOracle<T>,
    x_hat: &MatTuple<T>,
    y0: Option<&MatTuple<T>>,
    opts: &NewtonOptions,
) -> Result<NewtonTrace<T>> {
    let gx = x_hat.g();
    if f.g() != gx + f.g_out() {
        return Err(Error::SizeMismatch(format!(
            "map takes {} arguments, expected {} + {}",
            f.g(),
            gx,
            f.g_out()
        )));
    }
    let n = x_hat.n();
    let gy = f.g_out();
    let zero_x = MatTuple::zeros(gx, n);
    let eval = |y: &MatTuple<T>| f.eval(&x_hat.concat(y)?);
    let deriv = |y: &MatTuple<T>, h: &MatTuple<T>| derivative(f, &x_hat.concat(y)?, &zero_x.concat(h)?);

    let origin = MatTuple::zeros(f.g(), n);
    let partial = real_jacobian(&|_: &MatTuple<T>, h: &MatTuple<T>| derivative(f, &origin, &zero_x.concat(h)?), &MatTuple::zeros(gy, n))?;
    let (smin, smax) = extreme_singular_values(&partial);
    if !(smin > 1e-10 * smax.max(1.0)) {
        return Err(Error::Singular(smax / smin));
    }
    let y0 = y0.cloned().unwrap_or_else(|| MatTuple::zeros(gy, n));
    newton_solve(&eval, &deriv, &MatTuple::zeros(gy, n), y0, opts)
}

#[derive(Debug, Clone)]
pub struct InjectivityReport {
    /// `‖f(X₁) − f(X₂)‖`.
    pub value_gap: f64,
    pub applicable: bool,
    pub note: String,
    /// Norm of `Df(X₁⊕X₂)` applied to the off-diagonal direction built from `X₁ − X₂`.
    pub offdiag_image: Option<f64>,
    /// That norm divided by the norm of the direction.
    pub direction_gain: Option<f64>,
    /// Smallest singular value of the real Jacobian at `X₁⊕X₂`.
    pub sigma_min: Option<f64>,
}

/// Equal values at distinct points force a singular derivative at `X₁⊕X₂`.
pub fn injectivity_check<T: Field>(
    f: &FreeMapOracle<T>,
    x1: &MatTuple<T>,
    x2: &MatTuple<T>,
    tol: f64,
) -> Result<InjectivityReport> {
    let diff = x1.sub(x2)?;
    let value_gap = f.eval(x1)?.sub(&f.eval(x2)?)?.norm();
    let mut report = InjectivityReport {
        value_gap,
        applicable: false,
        note: String::new(),
        offdiag_image: None,
        direction_gain: None,
        sigma_min: None,
    };
    if diff.norm() == 0.0 {
        report.note = "points coincide; nothing to test".into();
        return Ok(report);
    }
    if value_gap >= tol {
        report.note = "values differ; no test applicable".into();
        return Ok(report);
    }
    let n = x1.n();
    let zero = DMatrix::<T>::zeros(n, n);
    let joint = x1.direct_sum(x2)?;
    let dir = MatTuple::new(diff.mats().iter().map(|m| crate::mateval::block2(&zero, m, m, &zero)).collect())?;
    let image = derivative(f, &joint, &dir)?;
    let offdiag = image.map(|m| {
        let mut o = m.clone();
        o.view_mut((0, 0), (n, n)).fill(T::zero());
        o.view_mut((n, n), (n, n)).fill(T::zero());
        o
    });
    let jac = real_jacobian(&|x, h| derivative(f, x, h), &joint)?;
    let (smin, _) = extreme_singular_values(&jac);
    report.applicable = true;
    report.offdiag_image = Some(offdiag.norm());
    report.direction_gain = Some(image.norm() / dir.norm());
    report.sigma_min = Some(smin);
    report.note = "equal values at distinct points: the derivative at the direct sum is singular".into();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mateval::{adjoint, conjugate, random_group_element, Group};
    use crate::ncalg::{Mode, NCPoly, Word};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poly(terms: &[(&str, f64)], mode: Mode) -> NCPoly<f64> {
        NCPoly::from_terms(mode, terms.iter().map(|(w, c)| (w.parse::<Word>().unwrap(), *c)))
    }

    #[test]
    fn identity_converges_in_one_step() {
        let f = FreeMapOracle::from_ncpoly(poly(&[("x1", 1.0)], Mode::Free));
        let y = MatTuple::single(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        let t = newton_invert(&f, &y, None, &NewtonOptions::default()).unwrap();
        assert!(t.converged);
        assert_eq!(t.iterates.len(), 2);
        assert!((t.x.get(0) - y.get(0)).norm() < 1e-12);
    }

    #[test]
    fn quadratic_map() {
        let f = FreeMapOracle::from_ncpoly(poly(&[("x1", 1.0), ("x1 x1", -1.0)], Mode::Free));
        let y = MatTuple::single(DMatrix::identity(2, 2) * 0.1);
        let t = newton_invert(&f, &y, None, &NewtonOptions { tol: 1e-12, ..Default::default() }).unwrap();
        assert!(t.converged);
        let root = (1.0 - (1.0 - 0.4f64).sqrt()) / 2.0;
        assert!((t.x.get(0) - DMatrix::identity(2, 2) * root).norm() < 1e-12);
        assert!(t.trust_radius > 0.0);
    }

    #[test]
    fn transpose_map_is_orthogonally_equivariant() {
        let f = FreeMapOracle::from_ncpoly(poly(&[("x1", 1.0), ("x1 x1*", 1.0)], Mode::Involution));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = MatTuple::<f64>::random_normal(1, 2, &mut rng);
        let s = b.get(0) + adjoint(b.get(0));
        let y = MatTuple::single(&s * (0.05 / s.norm()));
        let h = newton_invert(&f, &y, None, &NewtonOptions::default()).unwrap();
        assert!(h.final_residual() < 1e-10);
        let (u, _) = random_group_element::<f64>(Group::O, 2, 3).unwrap();
        let hy = newton_invert(&f, &conjugate(&y, &u, Group::O, 1e-8).unwrap(), None, &NewtonOptions::default()).unwrap();
        let expect = conjugate(&h.x, &u, Group::O, 1e-8).unwrap();
        assert!(hy.x.sub(&expect).unwrap().norm() < 1e-8);
    }

    #[test]
    fn implicit_transpose_square() {
        // y − x x^t = 0 at x = e12
        let f = FreeMapOracle::from_ncpolys(vec![poly(&[("x2", 1.0), ("x1 x1*", -1.0)], Mode::Involution)], 2);
        let x_hat = MatTuple::single(crate::mateval::matrix_unit::<f64>(2, 1, 2));
        let t = implicit_numeric(&f, &x_hat, None, &NewtonOptions::default()).unwrap();
        assert!(t.converged);
        assert!((t.x.get(0) - crate::mateval::matrix_unit::<f64>(2, 1, 1)).norm() < 1e-12);
    }

    #[test]
    fn square_is_not_injective() {
        let f = FreeMapOracle::from_ncpoly(poly(&[("x1 x1", 1.0)], Mode::Free));
        let x1 = MatTuple::single(DMatrix::identity(2, 2));
        let x2 = x1.scale(&-1.0);
        let r = injectivity_check(&f, &x1, &x2, 1e-10).unwrap();
        assert!(r.applicable);
        assert!(r.offdiag_image.unwrap() < 1e-12);
        assert!(r.sigma_min.unwrap() < 1e-10);

        let same = injectivity_check(&f, &x1, &x1, 1e-10).unwrap();
        assert!(!same.applicable);
        let id = FreeMapOracle::from_ncpoly(poly(&[("x1", 1.0)], Mode::Free));
        let r = injectivity_check(&id, &x1, &x2, 1e-10).unwrap();
        assert!(!r.applicable);
        assert!(r.note.contains("values differ"));
    }
}
