//! Recovery of power series coefficients of black-box free maps from
//! finitely many matrix evaluations, and polynomial identity testing.

mod expand;
mod identity;
mod interp;
mod matenote;
mod taylor;

pub use expand::{
    coefficient_algebra, expand_at_point, ExpandOptions, GenExpansion, MAX_COEFFICIENT_DIM, MAX_EXPANSION_DEGREE,
    MAX_EXPANSION_SIZE,
};
pub use identity::{
    is_identity, standard_polynomial, IdentityCandidate, IdentityOptions, IdentityReport, Verdict, MAX_STANDARD_EXPANSION,
};
pub use interp::{default_plan, homogeneous_part_eval, node_values, Interpolation, OVERSAMPLE};
pub use matenote::{matenote_extract, matenote_extract_at_level, MatenotePlan, MATENOTE_CLEANUP};
pub use taylor::{
    detect_degree, mode_for, reconstruct_polynomial, taylor_at_zero, DegreeReport, Reconstruction, TaylorExpansion,
    TaylorOptions,
};
