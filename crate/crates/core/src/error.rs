use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidTheta(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Exhaustive enumeration would visit more words than allowed.
    #[error("enumeration budget exceeded: {alphabet}^{length} = {required} words, budget is {budget}")]
    BudgetExceeded {
        alphabet: usize,
        length: usize,
        required: String,
        budget: u64,
    },

    #[error("exact arithmetic requested but the alphabet has no rational representation")]
    NotRational,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
