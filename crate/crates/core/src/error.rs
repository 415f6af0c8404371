use thiserror::Error;

/// Errors raised by the geometric and dynamical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {0} lies outside the open unit disk")]
    OutsideDisk(f64),

    #[error("isometry parameter |a| = {0} must be < 1")]
    InvalidIsometry(f64),

    #[error("octagon construction failed: {0}")]
    Construction(String),

    #[error("Reeb system is singular at this point (lambda ^ d lambda = {0:e})")]
    NonContact(f64),

    #[error("two-form has rank < 2 at this point")]
    RankDeficient,

    #[error("d lambda restricted to the contact plane is degenerate")]
    DegenerateContactPlane,

    #[error("Hofer selection did not terminate after {0} iterations")]
    HoferNonTermination(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("radius {r} outside the profile domain [{lo}, {hi}]")]
    OutsideDomain { r: f64, lo: f64, hi: f64 },

    #[error("profile slopes infeasible: s_left = {s_left}, s_right = {s_right}")]
    InfeasibleSlopes { s_left: f64, s_right: f64 },

    #[error("tube separation violated (margin {0})")]
    SeparationViolated(f64),

    #[error("point is ambiguous between two tube closures")]
    AmbiguousRegion,

    #[error("trajectory left the covered region (|z| = {0})")]
    BoundaryEscape(f64),

    #[error("step size underflow at time {0}")]
    StepUnderflow(f64),

    #[error("section is not transverse to the field at the seed (flux {0:e})")]
    NonTransverse(f64),

    #[error("no return to the section within time {0}")]
    NoReturn(f64),

    #[error("periodic orbit search did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("surface is not embedded or not contact: {0}")]
    BadSurface(String),
}

pub type Result<T> = std::result::Result<T, Error>;
