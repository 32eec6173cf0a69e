//! Inverse and implicit free functions: degree-graded formal inversion,
//! levelwise Newton inversion, and injectivity diagnostics.

mod formal;
mod newton;

pub use formal::{compose_tuple, formal_inverse, identity_residual, implicit_formal, LinearPart};
pub use newton::{
    derivative, implicit_numeric, injectivity_check, newton_invert, real_jacobian, InjectivityReport, NewtonOptions,
    NewtonStep, NewtonTrace,
};
