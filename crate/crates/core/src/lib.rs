pub mod error;
pub mod format;
pub mod invfun;
pub mod mateval;
pub mod ncalg;
pub mod oracle;
pub mod recon;
pub mod scalar;

pub use error::{Error, Result};
