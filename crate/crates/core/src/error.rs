use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    /// A well-formed input that breaks a validation rule.
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("not stratified: cycle through negation {}", .cycle.join(" -> "))]
    NotStratified { cycle: Vec<String> },
    #[error("database violates {count} constraint grounding(s), first: {first}")]
    ConstraintViolation { count: usize, first: String },
    #[error("missing parameter for clause {0}")]
    MissingParameter(String),
    #[error("unknown ground variable {0}")]
    UnknownNode(String),
    #[error("ground graph is cyclic: {}", .cycle.join(" -> "))]
    Cyclic { cycle: Vec<String> },
    #[error("exact inference needs {required} error terms, guard is {guard}")]
    GuardExceeded { required: usize, guard: usize },
    #[error("{what} has {size} nodes, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("deadline exceeded")]
    Timeout,
    #[error("{0}")]
    Other(String),
}

impl Error {
    pub(crate) fn invalid(line: usize, message: impl Into<String>) -> Self {
        Error::Invalid {
            line,
            message: message.into(),
        }
    }
}
