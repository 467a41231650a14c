use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("probability masses sum to {sum}, expected 1 within 1e-12")]
    NotNormalized { sum: f64 },
    #[error("distribution has zero mean")]
    ZeroMean,
    #[error("distribution has infinite mean")]
    InfiniteMean,
    #[error("truncation support exceeds cap K = {cap}")]
    TruncationCap { cap: u32 },
    #[error("degree sum is odd; stub matching requires an even total")]
    OddDegreeSum,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-domain input rather
    /// than a failed mathematical precondition. The CLI maps these to
    /// exit code 2 and the rest to exit code 3.
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Parse(_) | Error::InvalidParameter(_) | Error::NotNormalized { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
