use crate::error::{Error, Result};
use crate::mateval::{eval_ncpoly_derivative, MatTuple};
use crate::scalar::Field;

use super::FreeMapOracle;

#[derive(Debug, Clone)]
pub struct DerivativeEstimate<T: Field> {
    pub value: MatTuple<T>,
    /// Norm of the difference of the last two extrapolants.
    pub error: f64,
}

const DEFAULT_STEP: f64 = 1e-2;

/// Gateaux derivative `δ^k f(X)(H)` for `k = 1, 2` by central differences
/// `t = h0, h0/2, …` combined with Richardson extrapolation.
///
/// `h0` defaults to `1e-2 / ‖H‖`.
pub fn directional_derivative<T: Field>(
    f: &FreeMapOracle<T>,
    x: &MatTuple<T>,
    h: &MatTuple<T>,
    order: usize,
    h0: Option<f64>,
    richardson_steps: usize,
) -> Result<DerivativeEstimate<T>> {
    if !(order == 1 || order == 2) {
        return Err(Error::InvalidArgument(format!("derivative order must be 1 or 2, got {order}")));
    }
    if x.g() != h.g() || x.n() != h.n() {
        return Err(Error::SizeMismatch("direction and base point differ in shape".into()));
    }
    let hn = h.norm();
    let center = f.eval(x)?;
    if hn == 0.0 {
        return Ok(DerivativeEstimate { value: MatTuple::zeros(f.g_out(), x.n()), error: 0.0 });
    }
    let t0 = h0.unwrap_or(DEFAULT_STEP / hn);
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {t0}")));
    }
    let quotient = |t: f64| -> Result<MatTuple<T>> {
        let plus = f.eval(&x.add(&h.scale(&T::from_real(t)))?)?;
        let minus = f.eval(&x.sub(&h.scale(&T::from_real(t)))?)?;
        Ok(match order {
            1 => plus.sub(&minus)?.scale(&T::from_real(0.5 / t)),
            _ => plus.sub(&center.scale(&T::from_real(2.0)))?.add(&minus)?.scale(&T::from_real(1.0 / (t * t))),
        })
    };

    // table[k] holds the k-times extrapolated value at the current step.
    let mut prev: Vec<MatTuple<T>> = vec![quotient(t0)?];
    let mut error = f64::INFINITY;
    for i in 1..=richardson_steps {
        let mut row = vec![quotient(t0 / 2f64.powi(i as i32))?];
        for k in 1..=i {
            let factor = 4f64.powi(k as i32) - 1.0;
            let diff = row[k - 1].sub(&prev[k - 1])?;
            row.push(row[k - 1].add(&diff.scale(&T::from_real(1.0 / factor)))?);
        }
        error = row[i].sub(&prev[i - 1])?.norm();
        prev = row;
    }
    let value = prev.pop().expect("nonempty table");
    if !value.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(DerivativeEstimate { value, error })
}

/// Exact first derivative for oracles carrying a symbolic form.
pub fn exact_directional_derivative<T: Field>(
    f: &FreeMapOracle<T>,
    x: &MatTuple<T>,
    h: &MatTuple<T>,
) -> Option<Result<MatTuple<T>>> {
    let polys = f.polys()?;
    Some(
        polys
            .iter()
            .map(|p| eval_ncpoly_derivative(p, x, h))
            .collect::<Result<Vec<_>>>()
            .and_then(MatTuple::new),
    )
}
