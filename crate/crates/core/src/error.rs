use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("degree {0} must be even and at least 2")]
    InvalidDegree(i64),
    #[error("parity index p = {0} must be 0 or 1")]
    InvalidParity(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step size underflow at z = {z} (step {step:e})")]
    StepUnderflow { z: Complex64, step: f64 },

    #[error("radius {radius} too small: P(R) - lambda = {margin} <= 0")]
    RadiusTooSmall { radius: f64, margin: f64 },
    #[error("eigenvalue {k} did not converge; last bracket [{lo}, {hi}]")]
    ConvergenceFailure { k: usize, lo: f64, hi: f64 },
    #[error("eigenvalue {k} has {found} real zeros")]
    IndexMismatch { k: usize, found: usize },

    #[error("|y| fell below the floor on a contour near z = {z}")]
    BoundaryZero { z: Complex64 },
    #[error("argument refinement exceeded {0} nodes on one side")]
    RefinementLimit(usize),

    #[error("two QES eigenvalues coincide near {0}")]
    DegenerateEigenvalue(f64),
    #[error("a root of the eigenfactor is too close to zero ({0:e})")]
    ZeroRoot(f64),
    #[error("root isolation found {found} of {expected} real roots")]
    RootIsolation { expected: usize, found: usize },
    #[error("cross-check mismatch: {0}")]
    Mismatch(String),
    #[error("tree constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("asymptotic value did not stabilize: |f(R) - f(1.2R)| = {gap:e}")]
    NotStabilized { gap: f64 },

    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("unsupported degree {0} for this operation")]
    Unsupported(usize),
}
