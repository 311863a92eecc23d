use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} exceeds the certified quotient horizon {horizon}")]
    HorizonExceeded { index: usize, horizon: usize },

    #[error("value is not irrational: {0}")]
    NotIrrational(String),

    #[error("continued fraction is not eventually periodic")]
    NotPeriodic,

    #[error("invalid denominator {0}; must be at least 1")]
    InvalidDenominator(BigInt),

    #[error("precision failure: {0}")]
    PrecisionFailure(String),

    #[error("cannot compare reals tagged with {left} and {right} bits")]
    PrecisionMismatch { left: u32, right: u32 },

    #[error("radius {0} lies outside the computed profile")]
    OutOfRange(String),

    #[error("scan radius {0} exceeds the oracle budget of 10^4")]
    ScanBudgetExceeded(String),

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }
}
