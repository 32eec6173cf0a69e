use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Field;

use super::{adjoint, condition_number, frobenius, MatTuple};

/// Symmetry group sequence acting by simultaneous similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    GL,
    O,
    U,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::GL => "GL",
            Group::O => "O",
            Group::U => "U",
        }
    }

    pub fn parse(s: &str) -> Option<Group> {
        match s.to_ascii_uppercase().as_str() {
            "GL" => Some(Group::GL),
            "O" => Some(Group::O),
            "U" => Some(Group::U),
            _ => None,
        }
    }
}

const GL_MAX_CONDITION: f64 = 1e6;

/// Random element of `G_n`, returned with its 2-norm condition number.
///
/// GL: Gaussian entries, resampled until the condition number is below 1e6.
/// O/U: Haar measure via QR of a Gaussian matrix with the diagonal of the
/// triangular factor normalized to be positive.
pub fn random_group_element<T: Field>(group: Group, n: usize, seed: u64) -> Result<(DMatrix<T>, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("group elements need n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match group {
        Group::GL => loop {
            let m = DMatrix::from_fn(n, n, |_, _| T::sample_normal(&mut rng));
            let cond = condition_number(&m);
            if cond.is_finite() && cond < GL_MAX_CONDITION {
                return Ok((m, cond));
            }
        },
        Group::O | Group::U => {
            if group == Group::U && !T::IS_COMPLEX {
                return Err(Error::InvalidArgument("the unitary group needs complex scalars".into()));
            }
            let m = DMatrix::from_fn(n, n, |_, _| {
                let z = T::sample_normal(&mut rng);
                if group == Group::O {
                    T::from_real(z.real())
                } else {
                    z
                }
            });
            let qr = m.qr();
            let (mut q, r) = qr.unpack();
            for j in 0..n {
                let d = r[(j, j)];
                let modulus = d.modulus();
                let phase = if modulus == 0.0 { T::one() } else { d.unscale(modulus) };
                let mut col = q.column_mut(j);
                col *= phase;
            }
            Ok((q, 1.0))
        }
    }
}

/// Membership test within `tol` (relative Frobenius deviation from `σσ^* = I`).
pub fn is_group_member<T: Field>(group: Group, sigma: &DMatrix<T>, tol: f64) -> bool {
    let n = sigma.nrows();
    if sigma.ncols() != n {
        return false;
    }
    match group {
        Group::GL => condition_number(sigma) < 1.0 / f64::EPSILON,
        Group::O | Group::U => {
            let dev = frobenius(&(sigma * adjoint(sigma) - DMatrix::identity(n, n)));
            let real = group == Group::U || sigma.iter().all(|x| x.imaginary().abs() <= tol);
            dev <= tol * (n as f64).sqrt().max(1.0) && real
        }
    }
}

/// `σ X_k σ^{-1}` componentwise, after checking that `σ ∈ G_n`.
pub fn conjugate<T: Field>(x: &MatTuple<T>, sigma: &DMatrix<T>, group: Group, tol: f64) -> Result<MatTuple<T>> {
    if sigma.nrows() != x.n() || sigma.ncols() != x.n() {
        return Err(Error::SizeMismatch(format!("conjugating size-{} tuple by a {}×{} matrix", x.n(), sigma.nrows(), sigma.ncols())));
    }
    let inv = match group {
        Group::GL => {
            let cond = condition_number(sigma);
            if !(cond < 1.0 / f64::EPSILON) {
                return Err(Error::Singular(cond));
            }
            sigma.clone().try_inverse().ok_or(Error::Singular(cond))?
        }
        Group::O | Group::U => {
            if !is_group_member(group, sigma, tol) {
                return Err(Error::GroupViolation(format!("matrix is not in {}_{}", group.name(), x.n())));
            }
            adjoint(sigma)
        }
    };
    Ok(x.map(|m| sigma * m * &inv))
}
