use std::fmt;
use std::io;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by data loading, map construction, training, and the
/// verification routines.
#[derive(Debug)]
pub enum Error {
    /// Underlying I/O failure (open, read, write).
    Io(io::Error),
    /// Malformed input data; `line` is 1-based within the file being read.
    Parse { line: usize, msg: String },
    /// Invalid configuration: bad parameter values or an inconsistent
    /// key=value block.
    Config(String),
    /// A feature map was asked to act as an orthogonal projection but its
    /// approximate kernel exceeds the exact kernel on some diagonal entry
    /// by more than numerical tolerance.
    NotProjection { index: usize, gap: f64 },
    /// An iterative solver failed to reach its target accuracy.
    Solver(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::NotProjection { index, gap } => write!(
                f,
                "map is not a projection: example {index} has K~(x,x) - K(x,x) = {gap:e} \
                 beyond tolerance"
            ),
            Error::Solver(msg) => write!(f, "solver failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}
