use thiserror::Error;

use crate::integrator::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent {0}: Lebesgue exponents must satisfy r >= 1")]
    InvalidExponent(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("discriminant nonpositive (alpha3^2 - 4 alpha1 alpha5 = {discriminant})")]
    NoRealRoots { discriminant: f64 },

    #[error("blow-up detected at t = {time}: sup|v| = {value:e} exceeds guard {guard:e}")]
    BlowUp {
        time: f64,
        value: f64,
        guard: f64,
        partial: Box<Trajectory>,
    },

    #[error("numerical failure at t = {time}: non-finite values in the solution")]
    NumericalFailure { time: f64, partial: Box<Trajectory> },

    #[error("inconclusive convergence order: {0}")]
    InconclusiveOrder(String),

    #[error("interval [{a}, {b}] is outside the sampled range [{lo}, {hi}]")]
    IntervalOutOfRange { a: f64, b: f64, lo: f64, hi: f64 },

    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),

    #[error("{run} run failed: {source}")]
    ComparisonRun {
        run: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for the guard/non-finite failures of a time integration.
    pub fn is_numerical_guard(&self) -> bool {
        match self {
            Error::BlowUp { .. } | Error::NumericalFailure { .. } => true,
            Error::ComparisonRun { source, .. } => source.is_numerical_guard(),
            _ => false,
        }
    }
}
