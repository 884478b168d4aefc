//! Linear programming and Euclidean projection.

pub mod lp;
pub mod qp;

pub use lp::{solve_lp, LinearProgram, LpSolution, LpStatus};
pub use qp::{bvls, solve_projection, Projection, QuadraticProjection};

/// Default feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-8;
