//! Command-line front end. [`run`] is the whole program; `main` only wires
//! it to the process streams.

mod commands;
mod demo;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncfree::Error;

pub use output::{Line, Output};

#[derive(Parser, Debug)]
#[command(name = "ncfree", version, about = "Free noncommutative maps: evaluation, reconstruction, identities and inversion")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Verification tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random trials per check.
    #[arg(long, global = true, default_value_t = 25)]
    pub trials: usize,
    /// One JSON object per line instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the primary output to this file.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Scalar field for numeric work.
    #[arg(long, global = true, value_enum, default_value_t = FieldArg::Real)]
    pub field: FieldArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldArg {
    Real,
    Complex,
}

/// Where a map comes from: a polynomial file or a named builtin.
#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// `NCPOLY1` file; a tuple of blocks gives a tuple-valued map.
    #[arg(long, conflicts_with = "builtin")]
    pub poly: Option<PathBuf>,
    /// Builtin map, e.g. `sinxxt` or `pow_xxt(3/2)`.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Number of arguments (defaults to the largest variable index used).
    #[arg(long)]
    pub g: Option<usize>,
    /// Override the symmetry group (GL, O or U).
    #[arg(long)]
    pub group: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical form of a word, or normal form of a polynomial file.
    Canon {
        /// Word such as `x2 x1*`; ignored with --file.
        word: Option<String>,
        /// `NCPOLY1` or `TRPOLY1` file.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Least rotation (cyclic equivalence).
        #[arg(long)]
        cyclic: bool,
        /// With --cyclic, also identify a word with its involution.
        #[arg(long)]
        star: bool,
    },
    /// Evaluate a polynomial file at an `MTX1` tuple.
    Eval {
        /// `NCPOLY1`, `TRPOLY1` or `GENPOLY1` file.
        #[arg(long)]
        poly: PathBuf,
        /// `MTX1` tuple.
        #[arg(long)]
        at: PathBuf,
    },
    /// Free-map axioms and derivative identities on random samples.
    Check {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Levels for the similarity and derivative checks.
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
        levels: Vec<usize>,
    },
    /// Coefficients of a map declared homogeneous of degree m.
    Extract {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        degree: usize,
    },
    /// Homogeneous parts at 0 up to a degree.
    Taylor {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        degree: usize,
    },
    /// Generalized expansion around a non-scalar point.
    ExpandAt {
        #[command(flatten)]
        oracle: OracleArgs,
        /// `MTX1` center.
        #[arg(long)]
        at: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Evaluation multiplicity (default degree + 1).
        #[arg(long)]
        s_eval: Option<usize>,
    },
    /// Randomized polynomial identity testing on M_n.
    Identity {
        /// Standard polynomial of this (even) degree.
        #[arg(long, conflicts_with_all = ["poly", "trace"])]
        standard: Option<usize>,
        #[arg(long, conflicts_with = "trace")]
        poly: Option<PathBuf>,
        /// `TRPOLY1` file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        /// Integer tuples and rational arithmetic.
        #[arg(long)]
        exact: bool,
    },
    /// Inverse of a map: formal series or Newton at a target.
    Invert {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long, conflicts_with = "newton")]
        formal: bool,
        #[arg(long)]
        newton: bool,
        /// Series degree for --formal.
        #[arg(long)]
        degree: Option<usize>,
        /// `MTX1` target for --newton.
        #[arg(long)]
        target: Option<PathBuf>,
        /// `MTX1` starting point for --newton.
        #[arg(long)]
        x0: Option<PathBuf>,
    },
    /// Solve f(x, y) = 0 for y: formal series or Newton at a point.
    Implicit {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Number of x variables; the rest are solved for.
        #[arg(long)]
        gx: usize,
        #[arg(long, conflicts_with = "newton")]
        formal: bool,
        #[arg(long)]
        newton: bool,
        #[arg(long)]
        degree: Option<usize>,
        /// `MTX1` value of x for --newton.
        #[arg(long)]
        at: Option<PathBuf>,
        /// `MTX1` starting y for --newton.
        #[arg(long)]
        y0: Option<PathBuf>,
    },
    /// Scripted experiments with a pass/fail line per criterion.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        /// Size parameter for `nonuniform`.
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoName {
    Cont,
    Ck,
    Sin,
    Nonuniform,
    Roundtrip,
    Inverse,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

/// Runs the program on `argv` (including the program name). Returns the exit
/// code: 0 on success, 2 when a verification fails, 1 on usage or input errors.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{shown}");
                    0
                }
                _ => {
                    let _ = write!(err, "{shown}");
                    1
                }
            };
        }
    };
    let result = commands::dispatch(&cli);
    match result {
        Ok(output) => {
            if let Err(e) = output.emit(out, cli.common.json, cli.common.out.as_deref()) {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
            if output.failed() {
                2
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
