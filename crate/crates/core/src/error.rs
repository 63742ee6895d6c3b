use thiserror::Error;

/// Errors raised by the numerical pipeline and the molecule readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Duschinsky matrix is numerically singular (condition number {condition:.3e})")]
    SingularDuschinsky { condition: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Bogoliubov invariants violated: {what} residual {residual:.3e} exceeds {tolerance:.1e}")]
    InvariantViolation {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("pole in the quadratic factor: |1 - kappa*d| = {0:.3e}")]
    Pole(f64),

    #[error("squeezing parameter out of domain: |t| = {0:.6} must be < 1")]
    Domain(f64),

    #[error("photon budget exceeded: {0}")]
    CutoffExceeded(String),

    #[error("truncated oracle did not converge: amplitude change {change:.3e} after padding to {workspace}")]
    NonConvergence { change: f64, workspace: usize },

    #[error("unit error: {0}")]
    Unit(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error comes from the numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularDuschinsky { .. }
                | Error::InvariantViolation { .. }
                | Error::Pole(_)
                | Error::Domain(_)
                | Error::CutoffExceeded(_)
                | Error::NonConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
