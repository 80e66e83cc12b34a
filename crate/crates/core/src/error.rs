use thiserror::Error;

/// Errors raised by the symbolic kernels.
///
/// Variants fall into three families that the command-line front end maps to
/// distinct exit codes: usage problems, exhausted truncation windows, and
/// verification residuals that failed to cancel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("window exceeded: {0}")]
    WindowExceeded(String),

    #[error("depth exhausted: order {order} lies below the certified tail depth {tail}")]
    DepthExhausted { order: i64, tail: i64 },

    #[error("nonzero residual at {location}: {residual}")]
    NonzeroResidual { location: String, residual: String },

    #[error("no differential rule for generator {0}")]
    MissingDifferentialRule(String),

    #[error("no flow supplied for generator {0}")]
    MissingFlow(String),

    #[error("bracket has a nonzero coefficient at differential order {0}")]
    NonIntegralBracket(i64),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown symbol `{symbol}` at offset {offset}")]
    UnknownSymbol { offset: usize, symbol: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed serialized value: {0}")]
    Decode(String),
}

impl Error {
    /// Process exit status used by the command-line tool for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonzeroResidual { .. } | Error::NonIntegralBracket(_) => 1,
            Error::WindowExceeded(_)
            | Error::DepthExhausted { .. }
            | Error::MissingDifferentialRule(_)
            | Error::MissingFlow(_) => 3,
            Error::Syntax { .. }
            | Error::UnknownSymbol { .. }
            | Error::InvalidArgument(_)
            | Error::Decode(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
