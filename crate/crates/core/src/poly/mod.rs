//! Complex polynomial arithmetic and root finding.
//!
//! Univariate dense polynomials, sparse bivariate polynomials, simultaneous
//! Aberth–Ehrlich root finding, two-dimensional Newton refinement and
//! Sylvester resultants.

mod aberth;
mod bi;
mod newton;
mod resultant;
mod uni;

pub use aberth::{
    aberth_raw, aberth_roots, aberth_roots_with, cluster_roots, AberthOptions, RootCluster,
    CLUSTER_RADIUS, DEFAULT_MAX_ITER, DEFAULT_ROOT_TOL, DEFAULT_SEED,
};
pub use bi::{BiPoly, Var};
pub use newton::{
    newton_polish2, NewtonOutcome, DEFAULT_NEWTON_MAX_ITER, DEFAULT_NEWTON_TOL, SINGULAR_GUARD,
};
pub use resultant::sylvester_resultant;
pub use uni::UniPoly;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomial of degree {degree} has no roots to find")]
    InvalidDegree { degree: usize },
    #[error("root iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("singular Jacobian (|det| = {det:e}, residual {residual:e})")]
    SingularJacobian { det: f64, residual: f64 },
    #[error("resultant vanishes identically (common factor)")]
    DegenerateSystem,
}
