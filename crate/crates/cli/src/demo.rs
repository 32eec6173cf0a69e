use nalgebra::DMatrix;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ncfree::format::{parse_ncpoly, write_mtx};
use ncfree::invfun::{compose_tuple, formal_inverse, identity_residual, newton_invert, NewtonOptions};
use ncfree::mateval::{matrix_unit, op_norm, MatTuple};
use ncfree::ncalg::{FormalSeries, Letter, Mode, NCPoly, Word};
use ncfree::oracle::{nonuniform_degree, nonuniform_h, nonuniform_witness, Builtin, FreeMapOracle};
use ncfree::recon::{homogeneous_part_eval, taylor_at_zero, TaylorOptions};
use ncfree::scalar::Coeff;

use crate::commands::CliResult;
use crate::output::{json_num, Line, Output};
use crate::{CliError, Common, DemoName};

const STEPS: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

pub fn run(name: DemoName, n: usize, c: &Common) -> CliResult<Output> {
    match name {
        DemoName::Cont => cont(),
        DemoName::Ck => ck(),
        DemoName::Sin => sin(c),
        DemoName::Nonuniform => nonuniform(n),
        DemoName::Roundtrip => roundtrip(c),
        DemoName::Inverse => inverse(c),
    }
}

fn scalar(f: &FreeMapOracle<f64>, t: f64) -> CliResult<f64> {
    Ok(f.eval1(&MatTuple::single(DMatrix::from_element(1, 1, t)))?[(0, 0)])
}

fn increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn row(key: &str, h: f64, values: &[(&str, f64)]) -> Line {
    let text = std::iter::once(format!("{key}={h:.0e}"))
        .chain(values.iter().map(|(k, v)| format!("{k}={v:.6e}")))
        .collect::<Vec<_>>()
        .join(" ");
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), json!("row"));
    obj.insert(key.into(), json_num(h));
    for (k, v) in values {
        obj.insert((*k).into(), json_num(*v));
    }
    Line::info(text, obj.into())
}

fn cont() -> CliResult<Output> {
    let f = Builtin::PowXxt(1.0 / 3.0).build::<f64>();
    let mut out = Output::default();
    let mut qs = Vec::new();
    for h in STEPS {
        let q = scalar(&f, h)?.abs() / h;
        out.push(row("h", h, &[("quotient", q)]));
        qs.push(q);
    }
    out.push(Line::criterion("cont_quotient_grows", increasing(&qs), format!("{:.3e} -> {:.3e}", qs[0], qs[5])));
    Ok(out)
}

fn ck() -> CliResult<Output> {
    let f = Builtin::PowXxt(1.5).build::<f64>();
    let f0 = scalar(&f, 0.0)?;
    let mut out = Output::default();
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for h in STEPS {
        let (p, m) = (scalar(&f, h)?, scalar(&f, -h)?);
        let d1 = (p - f0).abs() / h;
        let d2 = (p - 2.0 * f0 + m).abs() / (h * h);
        out.push(row("h", h, &[("first", d1), ("second", d2)]));
        first.push(d1);
        second.push(d2);
    }
    let bounded = first.iter().all(|v| v.is_finite() && *v <= first[0]);
    out.push(Line::criterion("ck_first_bounded", bounded, format!("{:.3e} -> {:.3e}", first[0], first[5])));
    let divergent = increasing(&second) && second[5] > 10.0 * second[0];
    out.push(Line::criterion("ck_second_divergent", divergent, format!("{:.3e} -> {:.3e}", second[0], second[5])));
    Ok(out)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn sin(c: &Common) -> CliResult<Output> {
    let mut out = Output::default();
    let mut growth = Vec::new();
    for n in [4usize, 9, 16, 25] {
        let v = (-(n as f64).sqrt() + n as f64 * (n as f64).ln() - ln_factorial(n)).exp();
        out.push(Line::info(format!("n={n} e^(-sqrt n) n^n/n!={v:.6e}"), json!({"kind": "growth", "n": n, "value": json_num(v)})));
        growth.push(v);
    }
    out.push(Line::criterion("growth_increasing", increasing(&growth), format!("{:.3e} -> {:.3e}", growth[0], growth[3])));

    let f = Builtin::SinXxt.build::<f64>();
    let exp = taylor_at_zero(&f, 6, &TaylorOptions { seed: c.seed, ..Default::default() })?;
    let s = &exp.series[0];
    let xxt: NCPoly<f64> = parse_ncpoly("NCPOLY1 mode=involution\n1 : x1 x1*\n")?;
    let cube: NCPoly<f64> = parse_ncpoly::<f64>("NCPOLY1 mode=involution\n1 : x1 x1* x1 x1* x1 x1*\n")?.scale(&(-1.0 / 6.0));
    let err = s.part(2).max_coeff_diff(&xxt).max(s.part(6).max_coeff_diff(&cube));
    out.push(Line::criterion("sin_parts", err < 1e-6, format!("max coefficient error {err:.3e}")));

    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let radii = [1.0f64, 2.0, 4.0, 8.0];
    let mut sups = Vec::new();
    for &r in &radii {
        let mut sup = 0.0f64;
        for _ in 0..10 {
            let x = MatTuple::<f64>::random_on_sphere(1, 3, r, &mut rng);
            sup = sup.max(op_norm(&ncfree::mateval::eval_ncpoly(s.part(6), &x)?));
        }
        out.push(row("R", r, &[("sup_part6", sup)]));
        sups.push(sup);
    }
    let slope = log_slope(&radii, &sups);
    out.push(Line::criterion("part6_growth", (slope - 6.0).abs() <= 0.2, format!("slope {slope:.3}")));
    Ok(out)
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    num / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>()
}

fn inline<R: Coeff>(m: &DMatrix<R>) -> String {
    let rows: Vec<String> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_literal()).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join(";"))
}

fn nonuniform(n: usize) -> CliResult<Output> {
    if !(1..=7).contains(&n) {
        return Err(CliError::Usage(format!("nonuniform demo needs 1 <= n <= 7, got {n}")));
    }
    let size = n + 1;
    let x = nonuniform_witness::<BigRational>(n);
    let mut out = Output::primary(write_mtx(&nonuniform_witness::<f64>(n)));
    let sign: i64 = if n % 2 == 1 { 1 } else { -1 };
    let mut exact_ok = true;
    for k in 1..=size {
        let h = nonuniform_h(k, &x)?;
        let expected = if k == n {
            matrix_unit::<BigRational>(size, 1, size) * BigRational::from_integer((sign * (n as i64 + 1)).into())
        } else {
            DMatrix::zeros(size, size)
        };
        exact_ok &= h == expected;
        out.push(Line::info(format!("h_{k}={}", inline(&h)), json!({"kind": "h", "k": k, "value": inline(&h)})));
    }
    out.push(Line::criterion("h_values", exact_ok, format!("h_{n} = {}(n+1)e_(1,{size}), others 0", if sign > 0 { "+" } else { "-" })));

    let deg = nonuniform_degree(n)?;
    let formula = 2 * n * n + 3 * n + 1;
    out.push(Line::criterion("degree", deg == formula, format!("deg h_{n} = {deg}, 2n^2+3n+1 = {formula}")));

    let fact: f64 = (1..=size).map(|k| k as f64).product();
    let scale = (std::f64::consts::FRAC_PI_2 / fact).powf(1.0 / deg as f64);
    let y = nonuniform_witness::<f64>(n).scale(&scale);
    let f = Builtin::Nonuniform.build::<f64>();
    let fy = f.eval1(&y)?;
    out.push(Line::info(format!("f(y)={}", inline(&fy.map(|v| (v * 1e12).round() / 1e12))), json!({"kind": "f_y", "value": inline(&fy)})));
    let e = matrix_unit::<f64>(size, 1, size) + matrix_unit::<f64>(size, size, 1);
    let target = e * sign as f64;
    let value_err = (&fy - &target).abs().max();
    out.push(Line::criterion("f_value", value_err < 1e-9, format!("max entry error {value_err:.3e}")));
    let mut partial = DMatrix::zeros(size, size);
    for m in 0..=n {
        partial += homogeneous_part_eval(&f, m, &y, n, Some(0.5))?.get(0);
    }
    let gap = op_norm(&(&fy - partial));
    out.push(Line::criterion("partial_sum_gap", (gap - 1.0).abs() < 1e-6, format!("gap norm {gap:.9}")));
    Ok(out)
}

fn random_poly(rng: &mut ChaCha8Rng, g: usize, d: usize, mode: Mode) -> NCPoly<f64> {
    let alphabet = Letter::alphabet(g, mode);
    let word = |len: usize, rng: &mut ChaCha8Rng| Word((0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect());
    let mut p = NCPoly::zero(mode);
    for _ in 0..6 {
        let len = rng.random_range(0..=d);
        let c = rng.random_range(-8i32..=8) as f64 / 4.0;
        let w = word(len, rng);
        p.add_term(w, c);
    }
    let top = word(d, rng);
    p.add_term(top, 1.5);
    p
}

fn roundtrip(c: &Common) -> CliResult<Output> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut recovered = 0;
    let mut worst = 0.0f64;
    for i in 0..50usize {
        let g = 1 + i % 3;
        let d = 1 + (i / 3) % 4;
        let mode = if i % 2 == 0 { Mode::Involution } else { Mode::Free };
        let p = random_poly(&mut rng, g, d, mode);
        let f = FreeMapOracle::from_ncpolys(vec![p.clone()], g);
        let got = taylor_at_zero(&f, d, &TaylorOptions { seed: c.seed, ..Default::default() })?.polys().remove(0);
        let err = got.max_coeff_diff(&p);
        worst = worst.max(err);
        if err < 1e-7 {
            recovered += 1;
        }
    }
    let mut out = Output::default();
    out.push(Line::criterion("roundtrip", recovered == 50, format!("{recovered}/50 polynomials recovered, max error {worst:.3e}")));
    Ok(out)
}

fn inverse(c: &Common) -> CliResult<Output> {
    let mut out = Output::default();
    let f = vec![FormalSeries::from_poly(&parse_ncpoly::<f64>("NCPOLY1 mode=free\n1 : x1\n-1 : x1 x1\n")?, 1, 5)];
    let h = formal_inverse(&f, 5)?;
    let coeffs: Vec<f64> = (1..=5).map(|m| h[0].part(m).coeff(&Word::vars(&vec![1; m]))).collect();
    let res = identity_residual(&compose_tuple(&f, &h)?).max(identity_residual(&compose_tuple(&h, &f)?));
    out.push(Line::criterion(
        "catalan",
        coeffs == [1.0, 1.0, 2.0, 5.0, 14.0] && res < 1e-10,
        format!("coefficients {coeffs:?}, composition residual {res:.3e}"),
    ));

    let g = FreeMapOracle::from_ncpoly(parse_ncpoly::<f64>("NCPOLY1 mode=involution\n1 : x1\n1 : x1 x1*\n")?);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut worst = 0.0f64;
    let mut converged = true;
    for _ in 0..10 {
        let y = MatTuple::<f64>::random_on_sphere(1, 3, 0.05, &mut rng);
        let t = newton_invert(&g, &y, None, &NewtonOptions::default())?;
        converged &= t.converged;
        worst = worst.max(t.final_residual());
    }
    out.push(Line::criterion("newton", converged && worst < 1e-10, format!("10 targets of norm 0.05, max residual {worst:.3e}")));
    Ok(out)
}
