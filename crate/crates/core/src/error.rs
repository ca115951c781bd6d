use thiserror::Error;

/// Errors raised by parsing, validation and the automaton/transducer constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("label {0} is outside the universe of the theory")]
    Domain(String),
    #[error("tree has rank {rank}, which exceeds the bound k = {k}")]
    Bound { rank: usize, k: usize },
    #[error("invalid position {0}")]
    Position(String),
    #[error("variable x{var} is unbound (only {arity} subtrees given)")]
    Arity { var: usize, arity: usize },
    #[error("type error: {0}")]
    Type(String),
    #[error("unsupported capability: {0}")]
    Unsupported(String),
    #[error("function {function} is undefined at label {label} in rule {rule}")]
    PartialFunction {
        rule: String,
        function: String,
        label: String,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("more than {0} output trees")]
    TooManyOutputs(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn type_error(msg: impl Into<String>) -> Self {
        Error::Type(msg.into())
    }
}
