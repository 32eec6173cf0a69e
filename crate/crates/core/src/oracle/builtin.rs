use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mateval::{adjoint, apply_spectral, eval_ncpoly, eval_standard, sym_matrix_function, trace, Group, MatFn, MatTuple};
use crate::ncalg::{Mode, NCPoly, Word};
use crate::scalar::{Coeff, Field};
use num_rational::BigRational;

use super::{FreeMapOracle, Smoothness};

/// Named example maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// `(x x^*)^α`
    PowXxt(f64),
    /// `sin(x x^*)`
    SinXxt,
    /// `Σ_{j≤J} e^{-√(2^j)} cos(2^j (x + x^*))`
    SmoothNonanalytic(usize),
    /// `sin(Σ_k k!(h_k + h_k^*))` in three variables, truncated at `k < n` on level `n`.
    Nonuniform,
    /// `tr(x) I`: equivariant under similarity but not under direct sums.
    TraceTimesIdentity,
}

pub const DEFAULT_SMOOTH_TERMS: usize = 12;
const NONUNIFORM_MAX_LEVEL: usize = 8;

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::PowXxt(a) => write!(f, "pow_xxt({})", a),
            Builtin::SinXxt => write!(f, "sinxxt"),
            Builtin::SmoothNonanalytic(j) => write!(f, "smooth_nonanalytic({})", j),
            Builtin::Nonuniform => write!(f, "nonuniform"),
            Builtin::TraceTimesIdentity => write!(f, "trace_identity"),
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((p, q)) => Some(p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?),
        None => s.trim().parse().ok(),
    }
}

impl Builtin {
    /// Parses `name` or `name(param)`, e.g. `pow_xxt(1/3)` or `smooth_nonanalytic(20)`.
    pub fn parse(s: &str) -> Result<Builtin> {
        let s = s.trim();
        let (name, param) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => return Err(Error::InvalidArgument(format!("unbalanced parameter list in '{s}'"))),
            None => (s, None),
        };
        let bad = || Error::InvalidArgument(format!("bad parameter for builtin '{s}'"));
        let b = match name {
            "pow_xxt" => {
                let a = parse_number(param.ok_or_else(bad)?).ok_or_else(bad)?;
                if !(a > 0.0) {
                    return Err(bad());
                }
                Builtin::PowXxt(a)
            }
            "sinxxt" => Builtin::SinXxt,
            "smooth_nonanalytic" => {
                let j = match param {
                    Some(p) => p.trim().parse().map_err(|_| bad())?,
                    None => DEFAULT_SMOOTH_TERMS,
                };
                Builtin::SmoothNonanalytic(j)
            }
            "nonuniform" => Builtin::Nonuniform,
            "trace_identity" => Builtin::TraceTimesIdentity,
            _ => return Err(Error::InvalidArgument(format!("unknown builtin '{name}'"))),
        };
        if param.is_some() && matches!(b, Builtin::SinXxt | Builtin::Nonuniform | Builtin::TraceTimesIdentity) {
            return Err(bad());
        }
        Ok(b)
    }

    pub fn names() -> &'static [&'static str] {
        &["pow_xxt(<alpha>)", "sinxxt", "smooth_nonanalytic(<J>)", "nonuniform", "trace_identity"]
    }

    pub fn build<T: Field>(self) -> FreeMapOracle<T> {
        let involutive = if T::IS_COMPLEX { Group::U } else { Group::O };
        let name = self.to_string();
        match self {
            Builtin::PowXxt(alpha) => {
                let smooth = if alpha.fract() == 0.0 {
                    Smoothness::Polynomial(2 * alpha as usize)
                } else if alpha < 1.0 {
                    Smoothness::Continuous
                } else {
                    Smoothness::Ck(alpha.floor() as usize)
                };
                FreeMapOracle::from_fn(name, 1, 1, involutive, smooth, move |x: &MatTuple<T>| {
                    let a = x.get(0);
                    Ok(MatTuple::single(sym_matrix_function(MatFn::Pow(alpha), &(a * adjoint(a)))?))
                })
            }
            Builtin::SinXxt => FreeMapOracle::from_fn(name, 1, 1, involutive, Smoothness::Analytic, |x: &MatTuple<T>| {
                let a = x.get(0);
                Ok(MatTuple::single(sym_matrix_function(MatFn::Sin, &(a * adjoint(a)))?))
            }),
            Builtin::SmoothNonanalytic(terms) => {
                FreeMapOracle::from_fn(name, 1, 1, involutive, Smoothness::Smooth, move |x: &MatTuple<T>| {
                    let a = x.get(0);
                    let s = a + adjoint(a);
                    let y = apply_spectral(&s, |l| {
                        (0..=terms)
                            .map(|j| {
                                let p = 2f64.powi(j as i32);
                                (-p.sqrt()).exp() * (p * l).cos()
                            })
                            .sum()
                    })?;
                    Ok(MatTuple::single(y))
                })
            }
            Builtin::Nonuniform => FreeMapOracle::from_fn(name, 3, 1, involutive, Smoothness::Analytic, |x: &MatTuple<T>| {
                Ok(MatTuple::single(nonuniform_eval(x)?))
            })
            .with_max_level(NONUNIFORM_MAX_LEVEL),
            Builtin::TraceTimesIdentity => {
                FreeMapOracle::from_fn(name, 1, 1, Group::GL, Smoothness::Polynomial(1), |x: &MatTuple<T>| {
                    Ok(MatTuple::single(trace_times_identity(x.get(0))))
                })
            }
        }
    }
}

pub fn trace_times_identity<R: Coeff>(a: &DMatrix<R>) -> DMatrix<R> {
    let n = a.nrows();
    DMatrix::identity(n, n) * trace(a)
}

/// `z_ij = x3² x2^{i-1} x1^{j-1} − x2^i x1^j`.
pub fn nonuniform_z_poly<R: Coeff>(i: usize, j: usize) -> NCPoly<R> {
    let mut lead = vec![3, 3];
    lead.extend(std::iter::repeat(2).take(i - 1));
    lead.extend(std::iter::repeat(1).take(j - 1));
    let mut tail: Vec<usize> = std::iter::repeat(2).take(i).collect();
    tail.extend(std::iter::repeat(1).take(j));
    let mut p = NCPoly::zero(Mode::Free);
    p.add_term(Word::vars(&lead), R::one());
    p.add_term(Word::vars(&tail), -R::one());
    p
}

/// Argument list `z11, z22, z12, z33, z23, …, zkk, z_{k-1,k}, z_{k+1,k+1}` of `h_k`.
pub fn nonuniform_args(k: usize) -> Vec<(usize, usize)> {
    let mut args = vec![(1, 1)];
    for j in 2..=k {
        args.push((j, j));
        args.push((j - 1, j));
    }
    args.push((k + 1, k + 1));
    args
}

pub fn nonuniform_z<R: Coeff>(i: usize, j: usize, x: &MatTuple<R>) -> Result<DMatrix<R>> {
    eval_ncpoly(&nonuniform_z_poly(i, j), x)
}

/// `h_k = S_{2k}(z11, z22, z12, …)` evaluated on `x`.
pub fn nonuniform_h<R: Coeff>(k: usize, x: &MatTuple<R>) -> Result<DMatrix<R>> {
    if x.g() != 3 {
        return Err(Error::SizeMismatch(format!("h_k takes 3 arguments, got {}", x.g())));
    }
    let mats = nonuniform_args(k)
        .into_iter()
        .map(|(i, j)| nonuniform_z(i, j, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(eval_standard(&mats, x.n()))
}

/// Degree of `h_k` from the symbolic degrees of its (homogeneous) arguments;
/// the standard polynomial is multilinear, so degrees add.
pub fn nonuniform_degree(k: usize) -> Result<usize> {
    let mut total = 0;
    for (i, j) in nonuniform_args(k) {
        let z = nonuniform_z_poly::<BigRational>(i, j);
        if !z.is_homogeneous() {
            return Err(Error::InvalidArgument(format!("z_{i}{j} is not homogeneous")));
        }
        total += z.degree().unwrap_or(0);
    }
    Ok(total)
}

fn nonuniform_eval<T: Field>(x: &MatTuple<T>) -> Result<DMatrix<T>> {
    let n = x.n();
    let mut arg = DMatrix::zeros(n, n);
    let mut fact = 1.0;
    for k in 1..n {
        fact *= k as f64;
        let h = nonuniform_h(k, x)?;
        arg += (&h + adjoint(&h)) * T::from_real(fact);
    }
    sym_matrix_function(MatFn::Sin, &arg)
}

fn shift_tuple<R: Coeff>(n: usize, corner: R) -> MatTuple<R> {
    let size = n + 1;
    let mut x1 = DMatrix::zeros(size, size);
    let mut x2 = DMatrix::zeros(size, size);
    for i in 0..n {
        x1[(i, i + 1)] = R::one();
        x2[(i + 1, i)] = R::one();
    }
    let mut x3 = DMatrix::identity(size, size);
    x3[(n - 1, n)] = corner;
    MatTuple::new(vec![x1, x2, x3]).expect("equal sizes")
}

/// Witness tuple in `M_{n+1}` with `x3 = I + ½e_{n,n+1}`, so that
/// `z_ii = e_ii + e_{n,n+1}` and `h_n = (−1)^{n−1}(n+1)e_{1,n+1}`.
pub fn nonuniform_witness<R: Coeff>(n: usize) -> MatTuple<R> {
    shift_tuple(n, R::from_ratio(1, 2))
}

/// Witness tuple with `x3 = I + e_{n,n+1}`; here `h_n = 2(−1)^{n−1}(n+1)e_{1,n+1}`.
pub fn nonuniform_witness_as_printed<R: Coeff>(n: usize) -> MatTuple<R> {
    shift_tuple(n, R::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mateval::matrix_unit;
    use num_rational::BigRational;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn parse_names() {
        assert_eq!(Builtin::parse("pow_xxt(1/3)").unwrap(), Builtin::PowXxt(1.0 / 3.0));
        assert_eq!(Builtin::parse("smooth_nonanalytic").unwrap(), Builtin::SmoothNonanalytic(DEFAULT_SMOOTH_TERMS));
        assert_eq!(Builtin::parse("sinxxt").unwrap(), Builtin::SinXxt);
        assert!(Builtin::parse("pow_xxt").is_err());
        assert!(Builtin::parse("pow_xxt(-1)").is_err());
        assert!(Builtin::parse("cosxxt").is_err());
    }

    #[test]
    fn pow_half_is_abs_on_scalars() {
        let f = Builtin::PowXxt(0.5).build::<f64>();
        let y = f.eval1(&MatTuple::single(DMatrix::from_element(1, 1, -3.0))).unwrap();
        assert!((y[(0, 0)] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn sinxxt_at_diagonal() {
        let f = Builtin::SinXxt.build::<f64>();
        let x = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![FRAC_PI_2.sqrt(), 0.0]));
        let y = f.eval1(&MatTuple::single(x)).unwrap();
        assert!((y - matrix_unit::<f64>(2, 1, 1)).norm() < 1e-14);
    }

    #[test]
    fn smooth_nonanalytic_scalar_value() {
        let f = Builtin::SmoothNonanalytic(3).build::<f64>();
        let y = f.eval1(&MatTuple::single(DMatrix::from_element(1, 1, 0.25))).unwrap();
        let expect: f64 = (0..=3).map(|j| {
            let p = 2f64.powi(j);
            (-p.sqrt()).exp() * (p * 0.5).cos()
        }).sum();
        assert!((y[(0, 0)] - expect).abs() < 1e-14);
    }

    #[test]
    fn z_degrees() {
        assert_eq!(nonuniform_z_poly::<BigRational>(1, 1).degree(), Some(2));
        assert_eq!(nonuniform_z_poly::<BigRational>(2, 3).degree(), Some(5));
        assert_eq!(nonuniform_args(3), vec![(1, 1), (2, 2), (1, 2), (3, 3), (2, 3), (4, 4)]);
        for k in 1..=6 {
            assert_eq!(nonuniform_degree(k).unwrap(), 2 * k * k + 3 * k + 1);
        }
    }

    #[test]
    fn witness_units() {
        for n in 3..=4 {
            let x = nonuniform_witness::<BigRational>(n);
            for i in 1..=n + 1 {
                for j in i + 1..=n + 1 {
                    assert_eq!(nonuniform_z(i, j, &x).unwrap(), matrix_unit(n + 1, i, j));
                }
                let zii = matrix_unit(n + 1, i, i) + matrix_unit(n + 1, n, n + 1);
                assert_eq!(nonuniform_z(i, i, &x).unwrap(), zii);
            }
        }
    }

    #[test]
    fn as_printed_witness_doubles_h() {
        let n = 3;
        let x = nonuniform_witness_as_printed::<BigRational>(n);
        let h = nonuniform_h(n, &x).unwrap();
        assert_eq!(h, matrix_unit::<BigRational>(n + 1, 1, n + 1) * BigRational::from_integer(8.into()));
    }

    #[test]
    fn nonuniform_vanishes_on_low_levels() {
        let f = Builtin::Nonuniform.build::<f64>();
        let x = MatTuple::new(vec![DMatrix::from_element(1, 1, 0.7); 3]).unwrap();
        assert_eq!(f.eval1(&x).unwrap()[(0, 0)], 0.0);
        let big = MatTuple::zeros(3, 9);
        assert!(f.eval(&big).is_err());
    }

    #[test]
    fn trace_identity_map() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 5.0, 7.0, 2.0]);
        assert_eq!(trace_times_identity(&a), DMatrix::identity(2, 2) * 3.0);
    }
}
