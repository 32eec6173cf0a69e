use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mateval::{eval_ncpoly, Group, MatTuple};
use crate::ncalg::{FormalSeries, Mode, NCPoly};
use crate::oracle::{check_direct_sums, CheckReport, FreeMapOracle};
use crate::scalar::Field;

use super::interp::{default_plan, homogeneous_part_eval, node_values, Interpolation};
use super::matenote::matenote_extract;

/// One line of a residual report: `degree=<m> residual=<r> level=<n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    pub degree: usize,
    pub residual: f64,
    pub level: usize,
    pub flagged: bool,
}

impl fmt::Display for DegreeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "degree={} residual={:.3e} level={}", self.degree, self.residual, self.level)
    }
}

#[derive(Debug, Clone)]
pub struct TaylorOptions {
    pub tol: f64,
    pub seed: u64,
    /// Interpolation step; chosen from the oracle metadata when `None`.
    pub h: Option<f64>,
    /// Random points per consistency check.
    pub samples: usize,
}

impl Default for TaylorOptions {
    fn default() -> Self {
        TaylorOptions { tol: 1e-8, seed: 0, h: None, samples: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct TaylorExpansion<T: Field> {
    /// One series per output component.
    pub series: Vec<FormalSeries<T>>,
    /// Per-degree agreement of the extracted part with re-evaluation at level `m + 2`.
    pub report: Vec<DegreeReport>,
    /// `max ‖f(X) − Σ_m f_m(X)‖` over random points near 0.
    pub residual: f64,
}

impl<T: Field> TaylorExpansion<T> {
    pub fn flagged(&self) -> impl Iterator<Item = &DegreeReport> {
        self.report.iter().filter(|r| r.flagged)
    }

    pub fn polys(&self) -> Vec<NCPoly<T>> {
        self.series.iter().map(FormalSeries::to_poly).collect()
    }
}

/// Letters the expansion is written in: `x` only for GL, `x` and `x^*` otherwise.
pub fn mode_for(group: Group) -> Mode {
    match group {
        Group::GL => Mode::Free,
        Group::O | Group::U => Mode::Involution,
    }
}

fn ball_radius<T: Field>(f: &FreeMapOracle<T>, n: usize, cap: f64) -> f64 {
    (f.radius(n) / 2.0).min(cap)
}

fn relative(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

/// Homogeneous parts `f_0, …, f_D` of `f` at 0 as noncommutative polynomials.
pub fn taylor_at_zero<T: Field>(f: &FreeMapOracle<T>, d: usize, opts: &TaylorOptions) -> Result<TaylorExpansion<T>> {
    let mode = mode_for(f.group());
    let g = f.g();
    let mut parts: Vec<Vec<NCPoly<T>>> = vec![Vec::new(); f.g_out()];
    let mut report = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for m in 0..=d {
        let f_m = |y: &MatTuple<T>| homogeneous_part_eval(f, m, y, d, opts.h);
        let polys = matenote_extract(&f_m, g, m, mode)?;
        for (k, p) in polys.into_iter().enumerate() {
            parts[k].push(p);
        }

        let level = m + 2;
        let radius = ball_radius(f, level, 1.0);
        let mut worst: f64 = 0.0;
        for _ in 0..opts.samples {
            let x = MatTuple::random_on_sphere(g, level, radius, &mut rng);
            let direct = f_m(&x)?;
            for (k, v) in direct.mats().iter().enumerate() {
                let got = eval_ncpoly(&parts[k][m], &x)?;
                let r = relative(crate::mateval::frobenius(&(got - v)), crate::mateval::frobenius(v));
                worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });
            }
        }
        report.push(DegreeReport { degree: m, residual: worst, level, flagged: worst > opts.tol });
    }
    let series = parts
        .into_iter()
        .map(|ps| FormalSeries::from_parts(g, mode, ps))
        .collect::<Result<Vec<_>>>()?;

    let mut residual: f64 = 0.0;
    for level in [2, 3] {
        let radius = ball_radius(f, level, 0.1);
        for _ in 0..opts.samples {
            let x = MatTuple::random_in_ball(g, level, radius, &mut rng);
            let y = f.eval(&x)?;
            for (k, s) in series.iter().enumerate() {
                let approx = eval_ncpoly(&s.to_poly(), &x)?;
                residual = residual.max(crate::mateval::frobenius(&(approx - y.get(k))));
            }
        }
    }
    Ok(TaylorExpansion { series, report, residual })
}

#[derive(Debug, Clone)]
pub struct Reconstruction<T: Field> {
    pub polys: Vec<NCPoly<T>>,
    pub expansion: TaylorExpansion<T>,
    /// Residual of the recovered polynomial against `f` at levels `d + 1` and `d + 2`.
    pub certificate: Vec<DegreeReport>,
    pub passed: bool,
    /// Direct-sum check run when the certificate fails.
    pub witness: Option<CheckReport<T>>,
}

/// Recovers `f` as a free polynomial of degree ≤ `d`, certified on random
/// tuples at levels `d + 1` and `d + 2`.
pub fn reconstruct_polynomial<T: Field>(f: &FreeMapOracle<T>, d: usize, opts: &TaylorOptions) -> Result<Reconstruction<T>> {
    let expansion = taylor_at_zero(f, d, opts)?;
    let polys = expansion.polys();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut certificate = Vec::new();
    for level in [d + 1, d + 2] {
        let radius = ball_radius(f, level, 1.0);
        let mut worst: f64 = 0.0;
        for _ in 0..opts.samples.max(1) {
            let x = MatTuple::random_in_ball(f.g(), level, radius, &mut rng);
            let y = f.eval(&x)?;
            for (k, p) in polys.iter().enumerate() {
                let v = y.get(k);
                let r = relative(crate::mateval::frobenius(&(eval_ncpoly(p, &x)? - v)), crate::mateval::frobenius(v));
                worst = worst.max(r);
            }
        }
        certificate.push(DegreeReport { degree: d, residual: worst, level, flagged: !(worst <= opts.tol) });
    }
    let passed = certificate.iter().all(|c| !c.flagged);
    let witness = if passed {
        None
    } else {
        Some(check_direct_sums(f, &[(1, 1), (1, 2), (2, 2)], 5, opts.tol, opts.seed))
    };
    Ok(Reconstruction { polys, expansion, certificate, passed, witness })
}

/// Largest `m ≤ max_d` with `f_m ≠ 0` on random probes, or `None` when the
/// probe sees a nonzero part of degree `max_d + 1`. Aliasing of higher
/// degrees is not excluded, so the answer is a hint only.
pub fn detect_degree<T: Field>(f: &FreeMapOracle<T>, max_d: usize, tol: f64, seed: u64) -> Result<Option<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let level = max_d + 2;
    let radius = ball_radius(f, level, 1.0);
    let mut norms = vec![0.0f64; max_d + 2];
    for _ in 0..2 {
        let x = MatTuple::random_on_sphere(f.g(), level, radius, &mut rng);
        let (_, h) = default_plan(crate::oracle::Smoothness::Polynomial(max_d + 1), max_d + 1, x.norm(), f.radius(level));
        let plan = Interpolation::chebyshev(max_d + 2, h)?;
        let values = node_values(&|y| f.eval(y), &plan, &x)?;
        let scale = values.iter().map(MatTuple::norm).fold(1.0, f64::max);
        for (m, c) in plan.coefficients(&values)?.iter().enumerate() {
            norms[m] = norms[m].max(c.norm() / scale);
        }
    }
    if norms.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if norms[max_d + 1] > tol {
        return Ok(None);
    }
    Ok(Some((0..=max_d).rev().find(|&m| norms[m] > tol).unwrap_or(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::Word;
    use crate::oracle::Builtin;

    fn poly(terms: &[(&str, f64)], mode: Mode) -> NCPoly<f64> {
        NCPoly::from_terms(mode, terms.iter().map(|(w, c)| (w.parse::<Word>().unwrap(), *c)))
    }

    #[test]
    fn recovers_mixed_polynomial() {
        let p = poly(&[("1", 0.5), ("x1 x2 x1*", 2.0), ("x2*", -1.25), ("x1 x1", 3.0)], Mode::Involution);
        let f = FreeMapOracle::from_ncpolys(vec![p.clone()], 2);
        let t = taylor_at_zero(&f, 3, &TaylorOptions::default()).unwrap();
        assert!(t.polys()[0].max_coeff_diff(&p) < 1e-9);
        assert!(t.flagged().next().is_none(), "{:?}", t.report);
        assert!(t.residual < 1e-10);
    }

    #[test]
    fn zero_map_has_empty_parts() {
        let f = FreeMapOracle::from_ncpoly(NCPoly::<f64>::zero(Mode::Free));
        let t = taylor_at_zero(&f, 3, &TaylorOptions::default()).unwrap();
        assert!(t.series[0].parts().iter().all(NCPoly::is_zero));
    }

    #[test]
    fn sin_parts() {
        let f = Builtin::SinXxt.build::<f64>();
        let t = taylor_at_zero(&f, 6, &TaylorOptions::default()).unwrap();
        let s = &t.series[0];
        assert!(s.part(2).max_coeff_diff(&poly(&[("x1 x1*", 1.0)], Mode::Involution)) < 1e-6);
        let cube = poly(&[("x1 x1* x1 x1* x1 x1*", -1.0 / 6.0)], Mode::Involution);
        assert!(s.part(6).max_coeff_diff(&cube) < 1e-6);
        for m in [0, 1, 3, 4, 5] {
            assert!(s.part(m).is_zero(), "part {m}: {}", s.part(m));
        }
    }

    #[test]
    fn reconstruct_constant_and_cubic() {
        let f = FreeMapOracle::from_ncpoly(NCPoly::constant(2.0, Mode::Free));
        let r = reconstruct_polynomial(&f, 0, &TaylorOptions::default()).unwrap();
        assert!(r.passed);
        assert_eq!(r.polys[0], NCPoly::constant(2.0, Mode::Free));

        let p = poly(&[("x1 x2 x1*", 1.0)], Mode::Involution);
        let f = FreeMapOracle::from_ncpolys(vec![p.clone()], 2);
        let r = reconstruct_polynomial(&f, 3, &TaylorOptions::default()).unwrap();
        assert!(r.passed);
        assert!(r.polys[0].max_coeff_diff(&p) < 1e-10);
    }

    #[test]
    fn trace_map_is_not_a_free_polynomial() {
        let f = Builtin::TraceTimesIdentity.build::<f64>();
        let r = reconstruct_polynomial(&f, 1, &TaylorOptions::default()).unwrap();
        assert!(!r.passed);
        assert!(!r.witness.unwrap().passed());
    }

    #[test]
    fn degree_detection() {
        let f = FreeMapOracle::from_ncpolys(vec![poly(&[("x1 x2 x2", 1.0), ("x1", 1.0)], Mode::Free)], 2);
        assert_eq!(detect_degree(&f, 4, 1e-8, 0).unwrap(), Some(3));
        assert_eq!(detect_degree(&f, 2, 1e-8, 0).unwrap(), None);
    }

    #[test]
    fn report_line_format() {
        let r = DegreeReport { degree: 2, residual: 1.5e-12, level: 4, flagged: false };
        assert_eq!(r.to_string(), "degree=2 residual=1.500e-12 level=4");
    }
}
