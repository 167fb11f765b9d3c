use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point {point} lies outside the admissible domain ({what})")]
    Domain { point: Complex64, what: &'static str },

    #[error("evaluation produced a non-finite value at {point}")]
    Evaluation { point: Complex64 },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("Newton iteration stagnated at residual {residual:e} after {iterations} steps")]
    NonConvergence {
        residual: f64,
        iterations: usize,
        trace: Vec<f64>,
    },

    #[error("contour |z| = {radius} passes within {min_modulus:e} of a zero")]
    ContourTooClose { radius: f64, min_modulus: f64 },

    #[error("1 + r f'(z) vanishes at {point}")]
    DerivativeSingular { point: Complex64 },

    #[error("square-root branch could not be tracked continuously at r = {r}")]
    BranchTracking { r: f64 },

    #[error("map vanishes at the nonzero point {point}")]
    StarlikenessViolated { point: Complex64 },

    #[error("Re p <= 0 at {point} (value {value})")]
    NotPositive { point: Complex64, value: Complex64 },

    #[error("step size underflow at t = {t} (last state {state})")]
    Stiffness { t: f64, state: Complex64 },

    #[error("boundary continuation broke at angle {angle}")]
    ContinuationBreak { angle: f64 },

    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },

    #[error("region has no interior samples")]
    DegenerateRegion,

    #[error("negative-parameter extension left the invariant domain at r = {r}")]
    ExtensionUndefined { r: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
