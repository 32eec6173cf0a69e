use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

/// One line of a report, with its text and JSON renderings.
#[derive(Debug, Clone)]
pub struct Line {
    pub text: String,
    pub json: Value,
    pub fail: bool,
}

impl Line {
    pub fn info(text: impl Into<String>, json: Value) -> Self {
        Line { text: text.into(), json, fail: false }
    }

    /// `PASS <check> level=<n> residual=<r>` or the matching `FAIL` line.
    pub fn check(check: &str, level: usize, residual: f64, passed: bool) -> Self {
        let status = if passed { "PASS" } else { "FAIL" };
        Line {
            text: format!("{status} {check} level={level} residual={}", fmt_residual(residual)),
            json: json!({"kind": "check", "status": status, "check": check, "level": level, "residual": json_num(residual)}),
            fail: !passed,
        }
    }

    /// Criterion summary for demos: `PASS <name>: <detail>`.
    pub fn criterion(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        let status = if passed { "PASS" } else { "FAIL" };
        Line {
            text: format!("{status} {name}: {detail}"),
            json: json!({"kind": "criterion", "status": status, "criterion": name, "detail": detail}),
            fail: !passed,
        }
    }
}

pub fn fmt_residual(r: f64) -> String {
    format!("{r:.3e}")
}

/// Non-finite numbers become strings so the JSON stays valid.
pub fn json_num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

#[derive(Debug, Default)]
pub struct Output {
    /// Primary artifact in one of the text formats.
    pub primary: Option<String>,
    pub lines: Vec<Line>,
}

impl Output {
    pub fn primary(text: String) -> Self {
        Output { primary: Some(text), lines: Vec::new() }
    }

    pub fn push(&mut self, line: Line) {
        self.lines.push(line);
    }

    pub fn failed(&self) -> bool {
        self.lines.iter().any(|l| l.fail)
    }

    pub fn emit(&self, out: &mut dyn Write, json: bool, path: Option<&Path>) -> std::io::Result<()> {
        if let Some(text) = &self.primary {
            match path {
                Some(p) => {
                    std::fs::write(p, text)?;
                    if json {
                        writeln!(out, "{}", json!({"kind": "output", "path": p.display().to_string()}))?;
                    }
                }
                None if json => writeln!(out, "{}", json!({"kind": "output", "text": text}))?,
                None => write!(out, "{text}")?,
            }
        }
        for l in &self.lines {
            if json {
                writeln!(out, "{}", l.json)?;
            } else {
                writeln!(out, "{}", l.text)?;
            }
        }
        Ok(())
    }
}
