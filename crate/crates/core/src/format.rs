//! Line-oriented text formats: `NCPOLY1`, `TRPOLY1`, `GENPOLY1` and `MTX1`.
//!
//! Blank lines and lines starting with `#` are ignored. A file may hold
//! several blocks of the same kind, each opened by its header line; a tuple
//! of polynomials is written as consecutive blocks.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mateval::MatTuple;
use crate::ncalg::{parse_letter, GenPoly, GenTerm, Mode, NCPoly, TraceMonomial, TracePoly, Word};
use crate::scalar::{Coeff, Field};

fn perr(line: usize, column: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, column, msg: msg.into() }
}

/// Non-empty, non-comment lines with 1-based numbers.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
        .collect()
}

fn column_of(line: &str, part: &str) -> usize {
    (part.as_ptr() as usize).saturating_sub(line.as_ptr() as usize) + 1
}

fn parse_mode(line_no: usize, line: &str, header: &str) -> Result<Mode> {
    let rest = line.trim().strip_prefix(header).ok_or_else(|| perr(line_no, 1, format!("expected `{header}` header")))?;
    let rest = rest.trim();
    if rest.is_empty() {
        return Ok(Mode::Free);
    }
    match rest.strip_prefix("mode=") {
        Some("free") => Ok(Mode::Free),
        Some("involution") => Ok(Mode::Involution),
        _ => Err(perr(line_no, column_of(line, rest), format!("bad header option `{rest}`"))),
    }
}

fn parse_coeff<R: Coeff>(line_no: usize, line: &str, tok: &str) -> Result<R> {
    R::parse_literal(tok).ok_or_else(|| perr(line_no, column_of(line, tok), format!("bad coefficient `{}`", tok.trim())))
}

fn parse_word(line_no: usize, line: &str, text: &str) -> Result<Word> {
    if text.trim() == "1" {
        return Ok(Word::unit());
    }
    let mut letters = Vec::new();
    for tok in text.split_whitespace() {
        letters.push(parse_letter(tok).ok_or_else(|| perr(line_no, column_of(line, tok), format!("bad letter `{tok}`")))?);
    }
    if letters.is_empty() {
        return Err(perr(line_no, column_of(line, text), "empty word (write `1` for the unit)"));
    }
    Ok(Word(letters))
}

fn split_term(line_no: usize, line: &str) -> Result<(&str, &str)> {
    line.split_once(" : ")
        .or_else(|| line.split_once(':'))
        .ok_or_else(|| perr(line_no, 1, "expected `<coeff> : <monomial>`"))
}

/// Groups lines into blocks opened by `header`.
fn blocks<'a>(lines: &[(usize, &'a str)], header: &str) -> Result<Vec<Vec<(usize, &'a str)>>> {
    let mut out: Vec<Vec<(usize, &str)>> = Vec::new();
    for &(no, l) in lines {
        if l.trim_start().starts_with(header) {
            out.push(vec![(no, l)]);
        } else if let Some(b) = out.last_mut() {
            b.push((no, l));
        } else {
            return Err(perr(no, 1, format!("expected `{header}` header")));
        }
    }
    if out.is_empty() {
        return Err(perr(1, 1, format!("no `{header}` block found")));
    }
    Ok(out)
}

pub fn write_ncpoly<R: Coeff>(p: &NCPoly<R>) -> String {
    let mut s = format!("NCPOLY1 mode={}\n", p.mode().name());
    for (w, c) in p.terms() {
        let _ = writeln!(s, "{} : {}", c.to_literal(), w);
    }
    s
}

pub fn write_ncpolys<R: Coeff>(ps: &[NCPoly<R>]) -> String {
    ps.iter().map(write_ncpoly).collect()
}

pub fn parse_ncpolys<R: Coeff>(text: &str) -> Result<Vec<NCPoly<R>>> {
    let lines = content_lines(text);
    let mut out = Vec::new();
    for block in blocks(&lines, "NCPOLY1")? {
        let (no, header) = block[0];
        let mode = parse_mode(no, header, "NCPOLY1")?;
        let mut p = NCPoly::zero(mode);
        for &(no, line) in &block[1..] {
            let (c, w) = split_term(no, line)?;
            let w = parse_word(no, line, w)?;
            if w.has_starred() && !mode.has_involution() {
                return Err(perr(no, column_of(line, line.trim_start()), "starred letter in an involution-free polynomial"));
            }
            p.add_term(w, parse_coeff(no, line, c)?);
        }
        out.push(p);
    }
    Ok(out)
}

pub fn parse_ncpoly<R: Coeff>(text: &str) -> Result<NCPoly<R>> {
    let mut v = parse_ncpolys(text)?;
    if v.len() != 1 {
        return Err(perr(1, 1, format!("expected one polynomial, found {}", v.len())));
    }
    Ok(v.remove(0))
}

fn trace_monomial_text(m: &TraceMonomial) -> String {
    let mut parts: Vec<String> = m.pure().iter().map(|w| format!("tr({w})")).collect();
    if !m.tail().is_empty() || parts.is_empty() {
        parts.push(m.tail().to_string());
    }
    parts.join(" ")
}

pub fn write_tracepoly<R: Coeff>(p: &TracePoly<R>) -> String {
    let mut s = format!("TRPOLY1 mode={}\n", p.mode().name());
    for (m, c) in p.terms() {
        let _ = writeln!(s, "{} : {}", c.to_literal(), trace_monomial_text(m));
    }
    s
}

pub fn parse_tracepolys<R: Coeff>(text: &str) -> Result<Vec<TracePoly<R>>> {
    let lines = content_lines(text);
    let mut out = Vec::new();
    for block in blocks(&lines, "TRPOLY1")? {
        let (no, header) = block[0];
        let mode = parse_mode(no, header, "TRPOLY1")?;
        let mut p = TracePoly::zero(mode);
        for &(no, line) in &block[1..] {
            let (c, rest) = split_term(no, line)?;
            let mut pure = Vec::new();
            let mut rest = rest.trim_start();
            while let Some(inner) = rest.strip_prefix("tr(") {
                let close = inner.find(')').ok_or_else(|| perr(no, column_of(line, rest), "unclosed `tr(`"))?;
                pure.push(parse_word(no, line, &inner[..close])?);
                rest = inner[close + 1..].trim_start();
            }
            let tail = if rest.is_empty() { Word::unit() } else { parse_word(no, line, rest)? };
            let m = TraceMonomial::new(pure, tail, mode).map_err(|e| perr(no, 1, e.to_string()))?;
            p.add_term(m, parse_coeff(no, line, c)?);
        }
        out.push(p);
    }
    Ok(out)
}

pub fn parse_tracepoly<R: Coeff>(text: &str) -> Result<TracePoly<R>> {
    let mut v = parse_tracepolys(text)?;
    if v.len() != 1 {
        return Err(perr(1, 1, format!("expected one trace polynomial, found {}", v.len())));
    }
    Ok(v.remove(0))
}

fn inline_matrix<R: Coeff>(m: &DMatrix<R>) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_literal()).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join(";"))
}

pub fn write_genpoly<R: Coeff>(p: &GenPoly<R>) -> String {
    let mut s = format!("GENPOLY1 mode={}\nn={}\n", p.mode().name(), p.n());
    for t in p.terms() {
        let _ = writeln!(s, "deg={}", t.degree());
        let mut parts = vec![inline_matrix(&t.mats[0])];
        for (l, m) in t.letters.iter().zip(&t.mats[1..]) {
            parts.push(l.to_string());
            parts.push(inline_matrix(m));
        }
        let _ = writeln!(s, "{}", parts.join(" "));
    }
    s
}

fn parse_inline_matrix<R: Coeff>(no: usize, line: &str, body: &str, n: usize) -> Result<DMatrix<R>> {
    let rows: Vec<&str> = body.split(';').collect();
    if rows.len() != n {
        return Err(perr(no, column_of(line, body), format!("expected {n} rows, found {}", rows.len())));
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        let entries: Vec<&str> = r.split_whitespace().collect();
        if entries.len() != n {
            return Err(perr(no, column_of(line, r), format!("expected {n} entries, found {}", entries.len())));
        }
        for (j, e) in entries.iter().enumerate() {
            m[(i, j)] = parse_coeff(no, line, e)?;
        }
    }
    Ok(m)
}

fn parse_gen_term<R: Coeff>(no: usize, line: &str, n: usize, deg: usize) -> Result<GenTerm<R>> {
    let mut mats = Vec::new();
    let mut letters = Vec::new();
    let mut rest = line.trim_start();
    loop {
        let inner = rest.strip_prefix('[').ok_or_else(|| perr(no, column_of(line, rest), "expected `[`"))?;
        let close = inner.find(']').ok_or_else(|| perr(no, column_of(line, rest), "unclosed `[`"))?;
        mats.push(parse_inline_matrix(no, line, &inner[..close], n)?);
        rest = inner[close + 1..].trim_start();
        if rest.is_empty() {
            break;
        }
        let end = rest.find(|c: char| c.is_whitespace() || c == '[').unwrap_or(rest.len());
        let tok = &rest[..end];
        letters.push(parse_letter(tok).ok_or_else(|| perr(no, column_of(line, tok), format!("bad letter `{tok}`")))?);
        rest = rest[end..].trim_start();
    }
    if letters.len() != deg {
        return Err(perr(no, 1, format!("declared deg={deg} but found {} letters", letters.len())));
    }
    GenTerm::new(mats, letters).map_err(|e| perr(no, 1, e.to_string()))
}

pub fn parse_genpoly<R: Coeff>(text: &str) -> Result<GenPoly<R>> {
    let lines = content_lines(text);
    let (no, header) = *lines.first().ok_or_else(|| perr(1, 1, "empty input"))?;
    let mode = parse_mode(no, header, "GENPOLY1")?;
    let (no, nline) = *lines.get(1).ok_or_else(|| perr(no + 1, 1, "missing `n=<n>` line"))?;
    let n: usize = nline
        .trim()
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| perr(no, 1, "expected `n=<n>`"))?;
    let mut p = GenPoly::zero(n, mode);
    let mut i = 2;
    while i < lines.len() {
        let (no, dline) = lines[i];
        let deg: usize = dline
            .trim()
            .strip_prefix("deg=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| perr(no, 1, "expected `deg=<l>`"))?;
        let (tno, tline) = *lines.get(i + 1).ok_or_else(|| perr(no + 1, 1, "missing term line"))?;
        let term = parse_gen_term(tno, tline, n, deg)?;
        if term.letters.iter().any(|l| l.starred) && !mode.has_involution() {
            return Err(perr(tno, 1, "starred letter in an involution-free polynomial"));
        }
        p.push(term).map_err(|e| perr(tno, 1, e.to_string()))?;
        i += 2;
    }
    Ok(p)
}

pub fn write_mtx<T: Field>(x: &MatTuple<T>) -> String {
    let n = x.n();
    let mut s = format!("MTX1 n={} g={} field={}\n", n, x.g(), T::NAME);
    for m in x.mats() {
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| m[(i, j)].to_literal()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
    }
    s
}

pub fn parse_mtx<T: Field>(text: &str) -> Result<MatTuple<T>> {
    let lines = content_lines(text);
    let (no, header) = *lines.first().ok_or_else(|| perr(1, 1, "empty input"))?;
    let rest = header.trim().strip_prefix("MTX1").ok_or_else(|| perr(no, 1, "expected `MTX1` header"))?;
    let (mut n, mut g, mut field) = (None, None, None);
    for opt in rest.split_whitespace() {
        let col = column_of(header, opt);
        match opt.split_once('=') {
            Some(("n", v)) => n = Some(v.parse::<usize>().map_err(|_| perr(no, col, "bad size"))?),
            Some(("g", v)) => g = Some(v.parse::<usize>().map_err(|_| perr(no, col, "bad arity"))?),
            Some(("field", v)) if v == "real" || v == "complex" => field = Some(v.to_string()),
            _ => return Err(perr(no, col, format!("bad header option `{opt}`"))),
        }
    }
    let n = n.ok_or_else(|| perr(no, 1, "missing n="))?;
    let g = g.ok_or_else(|| perr(no, 1, "missing g="))?;
    if field.as_deref() == Some("complex") && !T::IS_COMPLEX {
        return Err(perr(no, 1, "complex data where real matrices are expected"));
    }
    let body = &lines[1..];
    if body.len() != n * g {
        let at = body.get(n * g).map_or(lines.last().unwrap().0 + 1, |l| l.0);
        return Err(perr(at, 1, format!("expected {} matrix rows, found {}", n * g, body.len())));
    }
    let mut mats = Vec::with_capacity(g);
    for k in 0..g {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let (no, line) = body[k * n + i];
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != n {
                return Err(perr(no, 1, format!("expected {n} entries, found {}", entries.len())));
            }
            for (j, e) in entries.iter().enumerate() {
                m[(i, j)] = parse_coeff(no, line, e)?;
            }
        }
        mats.push(m);
    }
    MatTuple::new(mats)
}
