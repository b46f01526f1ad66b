use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),

    #[error("expert {0} out of range for a network of {1} experts")]
    UnknownExpert(usize, usize),

    #[error("expertise vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("expert {0} has no contacts")]
    NoContacts(usize),

    #[error("{bound} is undefined for r = {r}: {reason}")]
    Domain {
        bound: &'static str,
        r: f64,
        reason: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
