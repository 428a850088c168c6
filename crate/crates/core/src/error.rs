use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid UTF-8 at byte offset {offset}")]
    Encoding { offset: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("query {query:?} cannot be sent: {reason}")]
    InvalidQuery { query: String, reason: String },

    #[error("request budget exhausted ({used} of {max} requests used)")]
    BudgetExhausted { used: u64, max: u64 },

    #[error("search backend failed after {attempts} attempts: {message}")]
    Backend { attempts: u32, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }
}
