use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("argument {x} outside the domain of {func}")]
    Domain { func: &'static str, x: f64 },

    #[error("degenerate polynomial: all coefficients below the trim threshold")]
    DegeneratePolynomial,

    #[error(
        "root finding did not converge on [{a}, {b}] (M = {m}, max |beta| = {max_beta:e}, {evaluations} evaluations)"
    )]
    NoConvergence {
        a: f64,
        b: f64,
        m: usize,
        max_beta: f64,
        evaluations: usize,
    },

    #[error("determinant exponent 2^{exponent} is not representable as f64")]
    DeterminantOverflow { exponent: i64 },

    #[error("error estimate unavailable: {0}")]
    EstimateUnavailable(String),

    #[error("kappa = {kappa} is not an eigenfrequency (sigma_min = {sigma:e})")]
    NotAnEigenfrequency { kappa: f64, sigma: f64 },

    #[error("no grid points inside the domain")]
    EmptyGrid,
}
