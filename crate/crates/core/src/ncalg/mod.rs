//! Exact symbolic core: words with involution, cyclic canonical forms, and the
//! polynomial flavors (free, trace, generalized) together with truncated series.

mod genpoly;
mod ncpoly;
mod series;
mod trace;
mod word;

pub use genpoly::{BasisMonomial, GenPoly, GenTerm};
pub use ncpoly::NCPoly;
pub use series::FormalSeries;
pub use trace::{TraceMonomial, TracePoly};
pub use word::{parse_letter, Letter, Mode, Word};
