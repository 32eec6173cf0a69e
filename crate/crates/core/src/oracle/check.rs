use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mateval::{adjoint, block2, conjugate, frobenius, random_group_element, Group, MatTuple};
use crate::scalar::Field;

use super::{directional_derivative, FreeMapOracle};

/// One offending sample. Evaluation failures are stored with an infinite residual.
#[derive(Debug, Clone)]
pub struct Witness<T: Field> {
    pub check: String,
    pub level: usize,
    pub inputs: Vec<MatTuple<T>>,
    pub residual: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CheckReport<T: Field> {
    pub name: String,
    pub trials: usize,
    pub tol: f64,
    pub max_violation: f64,
    pub witnesses: Vec<Witness<T>>,
}

impl<T: Field> CheckReport<T> {
    pub fn new(name: impl Into<String>, tol: f64) -> Self {
        CheckReport { name: name.into(), trials: 0, tol, max_violation: 0.0, witnesses: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// The witness with the largest residual.
    pub fn worst(&self) -> Option<&Witness<T>> {
        self.witnesses.iter().max_by(|a, b| a.residual.total_cmp(&b.residual))
    }

    pub fn record(&mut self, check: &str, level: usize, inputs: Vec<MatTuple<T>>, outcome: Result<f64>) {
        self.trials += 1;
        let (residual, error) = match outcome {
            Ok(r) if r.is_nan() => (f64::INFINITY, Some("residual is NaN".to_string())),
            Ok(r) => (r, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        self.max_violation = self.max_violation.max(residual);
        if residual > self.tol {
            self.witnesses.push(Witness { check: check.to_string(), level, inputs, residual, error });
        }
    }

    pub fn merge(&mut self, other: CheckReport<T>) {
        self.trials += other.trials;
        self.max_violation = self.max_violation.max(other.max_violation);
        self.witnesses.extend(other.witnesses);
    }
}

fn sample_radius<T: Field>(f: &FreeMapOracle<T>, levels: &[usize]) -> f64 {
    let delta = levels.iter().map(|&n| f.radius(n)).fold(f64::INFINITY, f64::min);
    (delta / 2.0).min(1.0)
}

/// `‖f(X⊕Y) − f(X)⊕f(Y)‖` on random pairs at the given level pairs.
pub fn check_direct_sums<T: Field>(
    f: &FreeMapOracle<T>,
    levels: &[(usize, usize)],
    trials: usize,
    tol: f64,
    seed: u64,
) -> CheckReport<T> {
    let mut report = CheckReport::new("direct_sum", tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &(m, n) in levels {
        let radius = sample_radius(f, &[m, n, m + n]);
        for _ in 0..trials {
            let x = MatTuple::random_in_ball(f.g(), m, radius, &mut rng);
            let y = MatTuple::random_in_ball(f.g(), n, radius, &mut rng);
            let outcome = (|| {
                let joint = f.eval(&x.direct_sum(&y)?)?;
                let split = f.eval(&x)?.direct_sum(&f.eval(&y)?)?;
                Ok(joint.sub(&split)?.norm())
            })();
            report.record("direct_sum", m + n, vec![x, y], outcome);
        }
    }
    report
}

/// `‖f(σXσ⁻¹) − σf(X)σ⁻¹‖ / max(1, ‖σf(X)σ⁻¹‖)` with `σ` drawn from `group`.
pub fn check_similarity<T: Field>(
    f: &FreeMapOracle<T>,
    group: Group,
    levels: &[usize],
    trials: usize,
    tol: f64,
    seed: u64,
) -> CheckReport<T> {
    let mut report = CheckReport::new(format!("similarity_{}", group.name()), tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counter = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for &n in levels {
        let radius = sample_radius(f, &[n]);
        for _ in 0..trials {
            counter = counter.wrapping_add(1);
            let x = MatTuple::random_in_ball(f.g(), n, radius, &mut rng);
            let outcome = random_group_element::<T>(group, n, counter).and_then(|(sigma, _)| {
                let lhs = f.eval(&conjugate(&x, &sigma, group, 1e-8)?)?;
                let rhs = conjugate(&f.eval(&x)?, &sigma, group, 1e-8)?;
                Ok(lhs.sub(&rhs)?.norm() / rhs.norm().max(1.0))
            });
            report.record(&format!("similarity_{}", group.name()), n, vec![x], outcome);
        }
    }
    report
}

fn block_upper<T: Field>(x: &MatTuple<T>, h: &MatTuple<T>) -> Result<MatTuple<T>> {
    let zero = DMatrix::zeros(x.n(), x.n());
    MatTuple::new(x.mats().iter().zip(h.mats()).map(|(a, b)| block2(a, b, &zero, a)).collect())
}

fn block_of<T: Field>(y: &MatTuple<T>, n: usize, row: usize, col: usize) -> MatTuple<T> {
    y.map(|m| m.view((row * n, col * n), (n, n)).into_owned())
}

/// `f([[X, H], [0, X]]) = [[f(X), δf(X)(H)], [0, f(X)]]`.
pub fn check_triangular_identity<T: Field>(
    f: &FreeMapOracle<T>,
    x: &MatTuple<T>,
    h: &MatTuple<T>,
    tol: f64,
) -> CheckReport<T> {
    let mut report = CheckReport::new("triangular", tol);
    let n = x.n();
    let outcome = (|| {
        let big = f.eval(&block_upper(x, h)?)?;
        let fx = f.eval(x)?;
        let d = directional_derivative(f, x, h, 1, None, 3)?.value;
        let mut r = block_of(&big, n, 0, 0).sub(&fx)?.norm();
        r = r.max(block_of(&big, n, 1, 1).sub(&fx)?.norm());
        r = r.max(block_of(&big, n, 1, 0).norm());
        r = r.max(block_of(&big, n, 0, 1).sub(&d)?.norm());
        Ok(r)
    })();
    report.record("triangular", 2 * n, vec![x.clone(), h.clone()], outcome);
    report
}

fn bracket<T: Field>(a: &DMatrix<T>, x: &MatTuple<T>) -> MatTuple<T> {
    x.map(|m| a * m - m * a)
}

/// `Df(X)([a, X]) = [a, f(X)]` for skew `a`, and the block instance at
/// `X ⊕ X₂` with `a = [[0, I], [−I, 0]]`, where `X₂` defaults to `X^*`.
pub fn check_commutator_identity<T: Field>(
    f: &FreeMapOracle<T>,
    x: &MatTuple<T>,
    a: &DMatrix<T>,
    partner: Option<&MatTuple<T>>,
    tol: f64,
) -> Result<CheckReport<T>> {
    let n = x.n();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::SizeMismatch(format!("generator is {}x{}, level is {n}", a.nrows(), a.ncols())));
    }
    let skew = frobenius(&(a + adjoint(a)));
    if skew > 1e-8 * frobenius(a).max(1.0) {
        return Err(Error::InvalidArgument(format!("generator is not skew (defect {skew:e})")));
    }
    let mut report = CheckReport::new("commutator", tol);
    let outcome = (|| {
        let d = directional_derivative(f, x, &bracket(a, x), 1, None, 3)?.value;
        Ok(d.sub(&bracket(a, &f.eval(x)?))?.norm())
    })();
    report.record("commutator", n, vec![x.clone()], outcome);

    let x2 = match partner {
        Some(p) => p.clone(),
        None => x.adjoint(),
    };
    let outcome = (|| {
        let id = DMatrix::<T>::identity(n, n);
        let zero = DMatrix::<T>::zeros(n, n);
        let big_a = block2(&zero, &id, &(-&id), &zero);
        let joint = x.direct_sum(&x2)?;
        let lhs = directional_derivative(f, &joint, &bracket(&big_a, &joint), 1, None, 3)?.value;
        Ok(lhs.sub(&bracket(&big_a, &f.eval(&joint)?))?.norm())
    })();
    report.record("commutator_block", 2 * n, vec![x.clone(), x2], outcome);
    Ok(report)
}
