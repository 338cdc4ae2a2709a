//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the numerical routines, the model layer and the
/// scenario runner.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("result not representable in double precision at z = {re} + {im}i")]
    OverflowRegion { re: f64, im: f64 },

    #[error("argument outside the open right half-plane: {0}")]
    DomainError(String),

    #[error("adaptive quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("moment integral diverges: {0}")]
    Divergent(String),

    #[error("limit does not converge: {0}")]
    NonConvergent(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("ambiguous square-root branch: {0}")]
    BranchAmbiguity(String),

    #[error("missing asymptotic expansion: {0}")]
    MissingAsymptotics(String),

    #[error("trivial measure (b_-1 == a_-1): corner time undefined")]
    TrivialMeasure,

    #[error(
        "inverse Laplace contour failed at {} time point(s), first t = {first_t:e} s",
        count
    )]
    ContourFailure { count: usize, first_t: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("metal database error: {0}")]
    Database(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Name of the module family an error originates from; used by the
    /// command-line runner when reporting failures.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) | Error::OverflowRegion { .. } => "complex_special",
            Error::DomainError(_) | Error::QuadratureFailure(_) | Error::NonConvergent(_) => {
                "pr_core"
            }
            Error::Divergent(_) => "sumrules",
            Error::InvalidParams(_) | Error::Unsupported(_) | Error::BranchAmbiguity(_) => "models",
            Error::MissingAsymptotics(_) | Error::TrivialMeasure | Error::ContourFailure { .. } => {
                "td_bounds"
            }
            Error::Config(_) | Error::Database(_) | Error::Io(_) => "report",
        }
    }

    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::OverflowRegion { .. }
                | Error::QuadratureFailure(_)
                | Error::Divergent(_)
                | Error::NonConvergent(_)
                | Error::ContourFailure { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
