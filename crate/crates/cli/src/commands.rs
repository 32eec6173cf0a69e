use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ncfree::format::{
    parse_genpoly, parse_mtx, parse_ncpolys, parse_tracepolys, write_genpoly, write_mtx, write_ncpolys,
    write_tracepoly,
};
use ncfree::invfun::{
    compose_tuple, formal_inverse, identity_residual, implicit_formal, implicit_numeric, newton_invert, NewtonOptions,
    NewtonTrace,
};
use ncfree::mateval::{adjoint, eval_genpoly, eval_ncpoly, eval_tracepoly, Group, MatTuple};
use ncfree::ncalg::{FormalSeries, GenPoly, NCPoly, Word};
use ncfree::oracle::{
    check_commutator_identity, check_direct_sums, check_similarity, check_triangular_identity, Builtin, CheckReport,
    FreeMapOracle,
};
use ncfree::recon::{
    expand_at_point, is_identity, matenote_extract, mode_for, taylor_at_zero, ExpandOptions, IdentityCandidate,
    IdentityOptions, TaylorOptions, Verdict,
};
use ncfree::scalar::Field;

use crate::output::{json_num, Line, Output};
use crate::{demo, Cli, CliError, Command, Common, FieldArg, OracleArgs};

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Tolerance for checks that go through finite differences.
const DERIVATIVE_TOL: f64 = 1e-6;
const DIRECT_SUM_LEVELS: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 2), (2, 3)];
const DERIVATIVE_TRIALS: usize = 5;

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn load_oracle<T: Field>(a: &OracleArgs) -> CliResult<FreeMapOracle<T>> {
    let mut f = match (&a.poly, &a.builtin) {
        (Some(path), None) => {
            let polys = parse_ncpolys::<T>(&read(path)?)?;
            let used = polys.iter().map(NCPoly::max_var).max().unwrap_or(0);
            let g = a.g.unwrap_or(used).max(1);
            if g < used {
                return Err(usage(format!("--g {g} is smaller than the largest variable index {used}")));
            }
            FreeMapOracle::from_ncpolys(polys, g)
        }
        (None, Some(name)) => Builtin::parse(name)?.build::<T>(),
        _ => return Err(usage("give exactly one of --poly or --builtin")),
    };
    if let Some(g) = &a.group {
        let group = Group::parse(g).ok_or_else(|| usage(format!("unknown group '{g}' (GL, O or U)")))?;
        f = f.with_group(group);
    }
    Ok(f)
}

fn load_mtx<T: Field>(path: &Path) -> CliResult<MatTuple<T>> {
    Ok(parse_mtx::<T>(&read(path)?)?)
}

pub fn dispatch(cli: &Cli) -> CliResult<Output> {
    let c = &cli.common;
    let complex = c.field == FieldArg::Complex;
    macro_rules! by_field {
        ($f:ident ( $($arg:expr),* )) => {
            if complex { $f::<Complex64>($($arg),*) } else { $f::<f64>($($arg),*) }
        };
    }
    match &cli.command {
        Command::Canon { word, file, cyclic, star } => canon(word.as_deref(), file.as_deref(), *cyclic, *star),
        Command::Eval { poly, at } => by_field!(eval(poly, at)),
        Command::Check { oracle, levels } => by_field!(check(oracle, levels, c)),
        Command::Extract { oracle, degree } => by_field!(extract(oracle, *degree, c)),
        Command::Taylor { oracle, degree } => by_field!(taylor(oracle, *degree, c)),
        Command::ExpandAt { oracle, at, degree, s_eval } => by_field!(expand(oracle, at, *degree, *s_eval, c)),
        Command::Identity { standard, poly, trace, n, exact } => identity(*standard, poly, trace, *n, *exact, c),
        Command::Invert { oracle, formal, newton, degree, target, x0 } => {
            if *formal == *newton {
                return Err(usage("choose one of --formal or --newton"));
            }
            if *formal {
                let d = degree.ok_or_else(|| usage("--formal needs --degree"))?;
                by_field!(invert_formal(oracle, d, c))
            } else {
                let target = target.as_ref().ok_or_else(|| usage("--newton needs --target"))?;
                by_field!(invert_newton(oracle, target, x0.as_ref(), c))
            }
        }
        Command::Implicit { oracle, gx, formal, newton, degree, at, y0 } => {
            if *formal == *newton {
                return Err(usage("choose one of --formal or --newton"));
            }
            if *formal {
                let d = degree.ok_or_else(|| usage("--formal needs --degree"))?;
                by_field!(implicit_series(oracle, *gx, d, c))
            } else {
                let at = at.as_ref().ok_or_else(|| usage("--newton needs --at"))?;
                by_field!(implicit_newton(oracle, at, y0.as_ref(), c))
            }
        }
        Command::Demo { name, n } => demo::run(*name, *n, c),
    }
}

fn canon(word: Option<&str>, file: Option<&Path>, cyclic: bool, star: bool) -> CliResult<Output> {
    if let Some(path) = file {
        let text = read(path)?;
        let header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
        if header.starts_with("TRPOLY1") {
            let polys = parse_tracepolys::<f64>(&text)?;
            return Ok(Output::primary(polys.iter().map(write_tracepoly).collect()));
        }
        let polys = parse_ncpolys::<f64>(&text)?;
        let polys: Vec<NCPoly<f64>> = if cyclic {
            polys
                .iter()
                .map(|p| {
                    NCPoly::from_terms(p.mode(), p.terms().map(|(w, c)| (w.cyclic_canonical(star), *c)).collect::<Vec<_>>())
                })
                .collect()
        } else {
            polys
        };
        return Ok(Output::primary(write_ncpolys(&polys)));
    }
    let w: Word = word.ok_or_else(|| usage("give a word or --file"))?.parse()?;
    let c = if cyclic { w.cyclic_canonical(star) } else { w };
    Ok(Output::primary(format!("{c}\n")))
}

fn eval<T: Field>(poly: &Path, at: &Path) -> CliResult<Output> {
    let text = read(poly)?;
    let x = load_mtx::<T>(at)?;
    let header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    let values = if header.starts_with("TRPOLY1") {
        parse_tracepolys::<T>(&text)?.iter().map(|p| eval_tracepoly(p, &x)).collect::<ncfree::Result<Vec<_>>>()?
    } else if header.starts_with("GENPOLY1") {
        vec![eval_genpoly(&parse_genpoly::<T>(&text)?, &x)?]
    } else {
        parse_ncpolys::<T>(&text)?.iter().map(|p| eval_ncpoly(p, &x)).collect::<ncfree::Result<Vec<_>>>()?
    };
    Ok(Output::primary(write_mtx(&MatTuple::new(values)?)))
}

#[derive(Default)]
struct CheckTable {
    rows: BTreeMap<(String, usize), (f64, bool)>,
}

impl CheckTable {
    fn add<T: Field>(&mut self, report: &CheckReport<T>, check: &str, level: usize) {
        let entry = self.rows.entry((check.to_string(), level)).or_insert((0.0, true));
        entry.0 = entry.0.max(report.max_violation);
        entry.1 &= report.passed();
    }

    fn add_witnessed<T: Field>(&mut self, report: &CheckReport<T>, levels: &[(&str, usize)]) {
        for &(check, level) in levels {
            self.rows.entry((check.to_string(), level)).or_insert((0.0, true));
        }
        for w in &report.witnesses {
            let e = self.rows.entry((w.check.clone(), w.level)).or_insert((0.0, true));
            e.0 = e.0.max(w.residual);
            e.1 = false;
        }
        // Passing samples only contribute to the overall maximum.
        if report.passed() {
            for &(check, level) in levels {
                let e = self.rows.get_mut(&(check.to_string(), level)).expect("inserted above");
                e.0 = e.0.max(report.max_violation);
            }
        }
    }

    fn into_output(self, out: &mut Output) {
        for ((check, level), (residual, passed)) in self.rows {
            out.push(Line::check(&check, level, residual, passed));
        }
    }
}

fn random_skew<T: Field>(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<T> {
    let m: DMatrix<T> = MatTuple::<T>::random_normal(1, n, rng).into_mats().remove(0);
    &m - adjoint(&m)
}

fn check<T: Field>(oracle: &OracleArgs, levels: &[usize], c: &Common) -> CliResult<Output> {
    let f = load_oracle::<T>(oracle)?;
    let allowed = |n: usize| f.max_level().is_none_or(|m| n <= m);
    let mut table = CheckTable::default();
    for &(m, n) in DIRECT_SUM_LEVELS.iter().filter(|(m, n)| allowed(m + n)) {
        let r = check_direct_sums(&f, &[(m, n)], c.trials, c.tol, c.seed);
        table.add(&r, "direct_sum", m + n);
    }
    let sim_name = format!("similarity_{}", f.group().name());
    for &n in levels.iter().filter(|&&n| n > 0 && allowed(n)) {
        let r = check_similarity(&f, f.group(), &[n], c.trials, c.tol, c.seed);
        table.add(&r, &sim_name, n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let tol = DERIVATIVE_TOL.max(c.tol);
    for &n in levels.iter().filter(|&&n| n >= 2 && allowed(2 * n)) {
        let radius = (f.radius(2 * n) / 4.0).min(1.0);
        for _ in 0..DERIVATIVE_TRIALS.min(c.trials.max(1)) {
            let x = MatTuple::<T>::random_in_ball(f.g(), n, radius, &mut rng);
            let a = random_skew::<T>(n, &mut rng);
            let r = check_commutator_identity(&f, &x, &a, None, tol)?;
            table.add_witnessed(&r, &[("commutator", n), ("commutator_block", 2 * n)]);
            if f.group() == Group::GL {
                let h = MatTuple::<T>::random_in_ball(f.g(), n, radius, &mut rng);
                let r = check_triangular_identity(&f, &x, &h, tol);
                table.add_witnessed(&r, &[("triangular", 2 * n)]);
            }
        }
    }
    let mut out = Output::default();
    table.into_output(&mut out);
    Ok(out)
}

fn relative_gap<T: Field>(a: &MatTuple<T>, b: &MatTuple<T>) -> CliResult<f64> {
    Ok(a.sub(b)?.norm() / (1.0 + a.norm().max(b.norm())))
}

fn extract<T: Field>(oracle: &OracleArgs, m: usize, c: &Common) -> CliResult<Output> {
    let f = load_oracle::<T>(oracle)?;
    let mode = mode_for(f.group());
    let polys = matenote_extract(&|x: &MatTuple<T>| f.eval(x), f.g(), m, mode)?;
    let level = m + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let radius = (f.radius(level) / 2.0).min(1.0);
    let mut worst = 0.0f64;
    for _ in 0..c.trials.clamp(1, 5) {
        let x = MatTuple::<T>::random_in_ball(f.g(), level, radius, &mut rng);
        let ours = MatTuple::new(polys.iter().map(|p| eval_ncpoly(p, &x)).collect::<ncfree::Result<Vec<_>>>()?)?;
        worst = worst.max(relative_gap(&ours, &f.eval(&x)?)?);
    }
    let mut out = Output::primary(write_ncpolys(&polys));
    out.push(Line::check("extract", level, worst, worst <= c.tol));
    Ok(out)
}

fn taylor<T: Field>(oracle: &OracleArgs, d: usize, c: &Common) -> CliResult<Output> {
    let f = load_oracle::<T>(oracle)?;
    let opts = TaylorOptions { tol: c.tol, seed: c.seed, ..Default::default() };
    let exp = taylor_at_zero(&f, d, &opts)?;
    let mut out = Output::primary(write_ncpolys(&exp.polys()));
    for r in &exp.report {
        out.push(Line::check(&format!("taylor_deg{}", r.degree), r.level, r.residual, !r.flagged));
    }
    out.push(Line::info(
        format!("series_residual={}", crate::output::fmt_residual(exp.residual)),
        json!({"kind": "series_residual", "value": json_num(exp.residual)}),
    ));
    Ok(out)
}

fn expand<T: Field>(oracle: &OracleArgs, at: &Path, d: usize, s: Option<usize>, c: &Common) -> CliResult<Output> {
    let f = load_oracle::<T>(oracle)?;
    let a = load_mtx::<T>(at)?;
    let s = s.unwrap_or(d + 1);
    let opts = ExpandOptions { tol: c.tol, seed: c.seed, ..Default::default() };
    let exp = expand_at_point(&f, &a, d, s, &opts)?;
    let mut text = String::new();
    for parts in &exp.parts {
        let terms = parts.iter().flat_map(|p| p.terms().iter().cloned()).collect();
        text.push_str(&write_genpoly(&GenPoly::from_terms(a.n(), mode_for(exp.group), terms)?));
    }
    let mut out = Output::primary(text);
    for r in &exp.report {
        out.push(Line::check(&format!("expand_deg{}", r.degree), r.level, r.residual, !r.flagged));
    }
    Ok(out)
}

fn identity(
    standard: Option<usize>,
    poly: &Option<PathBuf>,
    trace: &Option<PathBuf>,
    n: usize,
    exact: bool,
    c: &Common,
) -> CliResult<Output> {
    let candidate = match (standard, poly, trace) {
        (Some(m), None, None) => {
            if m == 0 || m % 2 == 1 {
                return Err(usage(format!("--standard takes an even degree, got {m}")));
            }
            IdentityCandidate::Standard(m / 2)
        }
        (None, Some(p), None) => {
            let mut polys = parse_ncpolys::<f64>(&read(p)?)?;
            if polys.len() != 1 {
                return Err(usage("identity testing takes a single polynomial"));
            }
            IdentityCandidate::Poly(polys.remove(0))
        }
        (None, None, Some(p)) => {
            let mut polys = parse_tracepolys::<f64>(&read(p)?)?;
            if polys.len() != 1 {
                return Err(usage("identity testing takes a single trace polynomial"));
            }
            IdentityCandidate::Trace(polys.remove(0))
        }
        _ => return Err(usage("give exactly one of --standard, --poly or --trace")),
    };
    let opts = IdentityOptions { trials: c.trials, seed: c.seed, exact, tol: c.tol, ..Default::default() };
    let rep = is_identity(&candidate, n, &opts)?;
    let verdict = match rep.verdict {
        Verdict::Identity => "IDENTITY",
        Verdict::NonIdentity => "NON-IDENTITY",
    };
    let mut out = match &rep.witness {
        Some(w) => Output::primary(write_mtx(w)),
        None => Output::default(),
    };
    out.push(Line::info(
        format!("{verdict} n={n} trials={} max_residual={}", rep.trials, crate::output::fmt_residual(rep.max_residual)),
        json!({"kind": "identity", "verdict": verdict, "n": n, "trials": rep.trials, "max_residual": json_num(rep.max_residual)}),
    ));
    Ok(out)
}

fn polynomial_series<T: Field>(f: &FreeMapOracle<T>, d: usize) -> CliResult<Vec<FormalSeries<T>>> {
    let polys = f.polys().ok_or_else(|| usage("formal series need a polynomial map (--poly)"))?;
    Ok(polys.iter().map(|p| FormalSeries::from_poly(p, f.g(), d)).collect())
}

fn invert_formal<T: Field>(oracle: &OracleArgs, d: usize, c: &Common) -> CliResult<Output> {
    let f = load_oracle::<T>(oracle)?;
    let series = polynomial_series(&f, d)?;
    let h = formal_inverse(&series, d)?;
    let residual = identity_residual(&compose_tuple(&series, &h)?).max(identity_residual(&compose_tuple(&h, &series)?));
    let mut out = Output::primary(write_ncpolys(&h.iter().map(FormalSeries::to_poly).collect::<Vec<_>>()));
    out.push(Line::check("formal_inverse", d, residual, residual <= c.tol));
    Ok(out)
}

fn newton_opts(c: &Common) -> NewtonOptions {
    let d = NewtonOptions::default();
    NewtonOptions { tol: d.tol.min(c.tol), ..d }
}

fn newton_output<T: Field>(trace: &NewtonTrace<T>, check: &str) -> Output {
    let mut out = Output::primary(write_mtx(&trace.x));
    for (i, s) in trace.iterates.iter().enumerate() {
        out.push(Line::info(
            format!("iter={} res={:.3e} step={:.3e}", i, s.residual, s.step),
            json!({"kind": "iter", "iter": i, "res": json_num(s.residual), "step": json_num(s.step)}),
        ));
    }
    out.push(Line::info(
        format!("trust_radius={:.3e} condition={:.3e}", trace.trust_radius, trace.condition),
        json!({"kind": "newton", "trust_radius": json_num(trace.trust_radius), "condition": json_num(trace.condition)}),
    ));
    out.push(Line::check(check, trace.x.n(), trace.final_residual(), trace.converged));
    out
}

fn invert_newton<T: Field>(oracle: &OracleArgs, target: &Path, x0: Option<&PathBuf>, c: &Common) -> CliResult<Output> {
    let f = load_oracle::<T>(oracle)?;
    let y = load_mtx::<T>(target)?;
    let x0 = x0.map(|p| load_mtx::<T>(p)).transpose()?;
    let trace = newton_invert(&f, &y, x0.as_ref(), &newton_opts(c))?;
    Ok(newton_output(&trace, "newton"))
}

fn implicit_series<T: Field>(oracle: &OracleArgs, gx: usize, d: usize, c: &Common) -> CliResult<Output> {
    let f = load_oracle::<T>(oracle)?;
    let series = polynomial_series(&f, d)?;
    let h = implicit_formal(&series, gx, d)?;
    let mode = series.iter().chain(&h).fold(ncfree::ncalg::Mode::Free, |m, s| m.join(s.mode()));
    let mut subs: Vec<FormalSeries<T>> = (1..=gx).map(|k| FormalSeries::variable(k, gx.max(1), mode, d)).collect();
    subs.extend(h.iter().cloned());
    let residual = series
        .iter()
        .map(|s| s.compose(&subs).map(|r| r.parts().iter().flat_map(|p| p.terms().map(|(_, c)| c.magnitude())).fold(0.0, f64::max)))
        .collect::<ncfree::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut out = Output::primary(write_ncpolys(&h.iter().map(FormalSeries::to_poly).collect::<Vec<_>>()));
    out.push(Line::check("implicit_formal", d, residual, residual <= c.tol));
    Ok(out)
}

fn implicit_newton<T: Field>(oracle: &OracleArgs, at: &Path, y0: Option<&PathBuf>, c: &Common) -> CliResult<Output> {
    let f = load_oracle::<T>(oracle)?;
    let x = load_mtx::<T>(at)?;
    let y0 = y0.map(|p| load_mtx::<T>(p)).transpose()?;
    let trace = implicit_numeric(&f, &x, y0.as_ref(), &newton_opts(c))?;
    Ok(newton_output(&trace, "implicit_newton"))
}
