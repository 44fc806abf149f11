use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} lies outside [0, 1]")]
    Domain(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("scale factor alpha[{index}] = {value} is not contractive (|alpha| must be < 1)")]
    NonContractive { index: usize, value: f64 },

    #[error("fixed-point iteration stopped after {iterations} iterations with residual {residual:e}")]
    Convergence { iterations: usize, residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("interpolation points are collinear: {0}")]
    Collinear(String),

    #[error("denominator x_i - x_(i-1) - alpha_i vanishes for branch {index}")]
    DegenerateDenominator { index: usize },

    #[error("scale 2^-{j} is too fine for a grid of resolution {resolution}")]
    Scale { j: u32, resolution: usize },

    #[error("regression failed: {0}")]
    Regression(String),

    #[error("dimension condition not satisfied: {0}")]
    Condition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures that mean a theorem hypothesis or gate rejected the
    /// input, as opposed to malformed input or a numerical failure.
    pub fn is_gate(&self) -> bool {
        matches!(
            self,
            Error::Precondition(_)
                | Error::Collinear(_)
                | Error::DegenerateDenominator { .. }
                | Error::Scale { .. }
                | Error::Regression(_)
                | Error::Condition(_)
                | Error::Config(_)
                | Error::Unsupported(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
