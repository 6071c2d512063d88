use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters or distributions supplied by the caller.
    #[error("configuration error: {0}")]
    Config(String),

    /// Arguments that do not fit together (mismatched dimensions and the like).
    #[error("usage error: {0}")]
    Usage(String),

    /// Malformed or inconsistent input data.
    #[error("data error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Data { line: Option<usize>, message: String },

    /// An observed zero entry where the algorithm needs nonzero values.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// Observations admit no exact rank-1 completion.
    #[error("observations are not rank-1 consistent at edge ({row}, {col})")]
    Inconsistent { row: usize, col: usize },

    /// No alphabet pair satisfies the tolerance on this observed entry.
    #[error("no factor pair in the alphabet satisfies edge ({row}, {col}) within tolerance")]
    InfeasibleEdge { row: usize, col: usize },

    #[error("numerical failure: {message} (residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn data(line: usize, message: impl Into<String>) -> Self {
        Error::Data {
            line: Some(line),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Usage(_) => 1,
            Error::Data { .. }
            | Error::Unsupported(_)
            | Error::Inconsistent { .. }
            | Error::InfeasibleEdge { .. }
            | Error::Io(_) => 2,
            Error::Numerical { .. } => 3,
        }
    }
}
