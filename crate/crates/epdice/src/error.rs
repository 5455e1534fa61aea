use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed a validation rule. `field` names the offending key.
    #[error("invalid parameter `{field}`: {reason}")]
    Validation { field: String, reason: String },

    /// The config text could not be parsed. Line numbers are 1-based.
    #[error("config parse error at line {line}: {message}")]
    Config { line: usize, message: String },

    /// An operation was called with arguments outside its mathematical domain.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// The forward recursion produced a non-finite or non-positive state.
    #[error("simulation infeasible at period {period} (year {year}): {reason}")]
    Infeasible {
        period: usize,
        year: i32,
        reason: String,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(field: &str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
