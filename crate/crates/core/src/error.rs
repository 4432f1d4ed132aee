use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series for {what} did not converge within {max_terms} terms")]
    NonConvergence { what: &'static str, max_terms: usize },

    #[error("{argument} lies within {distance:.3e} of the period lattice (floor {floor:.1e})")]
    PoleProximity {
        argument: &'static str,
        distance: f64,
        floor: f64,
    },

    #[error("branch ambiguous at path index {index}: argument step {step:.3} rad")]
    BranchAmbiguity { index: usize, step: f64 },

    #[error("unsupported builtin series: {0}")]
    UnsupportedBuiltin(String),

    #[error("truncation order {order} is below the leading exponent {leading}")]
    OrderTooSmall { order: String, leading: String },

    #[error("series power needs a unit leading coefficient, found {0}")]
    NonUnitLeading(String),

    #[error("Gamma pole in factor {factor} at j = {j}")]
    GammaPole { factor: &'static str, j: usize },

    #[error("parameters outside supported range: {0}")]
    OutOfSupportedRange(String),

    #[error("quadrature budget exceeded: {used} evaluations > {limit}")]
    QuadratureBudgetExceeded { used: usize, limit: usize },

    #[error("degenerate Gram matrix: squared norm of P_{n} is {norm:.3e}")]
    DegenerateGram { n: usize, norm: f64 },

    #[error("p = {0} is not supported (p <= 2)")]
    UnsupportedP(usize),

    #[error("sampled block basis is ill conditioned (condition number {cond:.3e})")]
    IllConditionedBasis { cond: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
