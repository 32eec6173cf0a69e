//! Coefficient rings.
//!
//! [`Coeff`] is the exact-arithmetic contract used by the symbolic layer and by
//! matrix evaluation; it is implemented for `f64`, `Complex64` and
//! `BigRational`. [`Field`] adds the floating-point structure needed by the
//! numeric linear algebra (SVD, eigendecompositions, sampling).

use std::ops::Neg;

use nalgebra::{ClosedAddAssign, ClosedMulAssign, ClosedSubAssign, ComplexField};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

pub trait Coeff:
    nalgebra::Scalar
    + Zero
    + One
    + ClosedAddAssign
    + ClosedSubAssign
    + ClosedMulAssign
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Scalar involution: identity on real rings, complex conjugation otherwise.
    fn conj(&self) -> Self;
    fn from_i64(v: i64) -> Self;
    /// `p / q`; exact for rationals.
    fn from_ratio(p: i64, q: i64) -> Self;
    /// Lossy view used for tolerance checks and reporting.
    fn magnitude(&self) -> f64;
    fn to_literal(&self) -> String;
    fn parse_literal(s: &str) -> Option<Self>;
}

/// Floating-point scalars (`f64` or `Complex64`).
pub trait Field: Coeff + ComplexField<RealField = f64> + Copy {
    const IS_COMPLEX: bool;
    const NAME: &'static str;

    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
    fn from_parts(re: f64, im: f64) -> Self;
    fn parts(self) -> (f64, f64);
    /// Real basis of the scalar field as a real vector space: `[1]` or `[1, i]`.
    fn real_units() -> Vec<Self>;
}

fn real_literal(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x)
    } else {
        format!("{:?}", x)
    }
}

impl Coeff for f64 {
    fn conj(&self) -> Self {
        *self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_literal(&self) -> String {
        real_literal(*self)
    }
    fn parse_literal(s: &str) -> Option<Self> {
        parse_real(s.trim())
    }
}

impl Field for f64 {
    const IS_COMPLEX: bool = false;
    const NAME: &'static str = "real";

    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }
    fn real_units() -> Vec<Self> {
        vec![1.0]
    }
}

impl Coeff for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Complex64::new(p as f64 / q as f64, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_literal(&self) -> String {
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        format!("{}{}{}i", real_literal(self.re), sign, real_literal(self.im.abs()))
    }
    fn parse_literal(s: &str) -> Option<Self> {
        parse_complex(s.trim())
    }
}

impl Field for Complex64 {
    const IS_COMPLEX: bool = true;
    const NAME: &'static str = "complex";

    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }
    fn real_units() -> Vec<Self> {
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]
    }
}

/// Decimal or `p/q`.
fn parse_real(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (p.parse::<f64>().ok()?, q.parse::<f64>().ok()?);
            (q != 0.0).then(|| p / q)
        }
        None => s.parse().ok(),
    }
}

/// Parses `a`, `bi`, `a+bi` and `a-bi`. Parts may be decimals, exponents like `1e-3`, or `p/q`.
fn parse_complex(s: &str) -> Option<Complex64> {
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return parse_real(s).map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    // split at the last sign that is not the leading one and not part of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, parse_imag(&body[k..])?),
        None => (0.0, parse_imag(body)?),
    };
    Some(Complex64::new(re, im))
}

fn parse_imag(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => parse_real(s),
    }
}

impl Coeff for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_literal(&self) -> String {
        self.to_string()
    }
    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Ok(r) = s.parse::<BigRational>() {
            return Some(r);
        }
        s.parse::<f64>().ok().and_then(BigRational::from_float)
    }
}

/// Exact rational image of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
