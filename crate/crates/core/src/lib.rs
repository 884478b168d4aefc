//! Uniqueness certificates and phase-transition estimates for l1 and
//! anisotropic total-variation recovery from linear measurements.

pub mod certify;
pub mod error;
pub mod linalg;
pub mod objectives;
pub mod par;
pub mod phase;
pub mod rng;
pub mod sensing;
pub mod signals;
pub mod solver;
pub mod statdim;
pub mod tv_prox;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
