use std::fmt;

/// Errors surfaced by the library. Arithmetic on mismatched fields and
/// division by zero are treated as programming bugs and panic instead.
#[derive(Debug)]
pub enum Error {
    /// A field characteristic that is not prime.
    NotPrime(u64),
    /// Requested field order exceeds the configured bound.
    FieldTooLarge { order: u128, limit: u64 },
    /// A precondition on user-supplied parameters failed.
    InvalidParameter(String),
    /// An embedding was requested between incompatible fields.
    NotASubfield { src: String, dst: String },
    /// Series precision hit the auto-raise cap before a nonzero
    /// coefficient appeared.
    PrecisionExceeded { cap: usize },
    /// Group closure exceeded the configured element bound.
    ClosureBoundExceeded { bound: usize },
    /// A curve member file could not be parsed.
    SpecParse { line: usize, msg: String },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::FieldTooLarge { order, limit } => {
                write!(f, "field order {order} exceeds limit {limit}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NotASubfield { src, dst } => {
                write!(f, "{src} does not embed into {dst}")
            }
            Error::PrecisionExceeded { cap } => {
                write!(f, "series precision cap {cap} exceeded")
            }
            Error::ClosureBoundExceeded { bound } => {
                write!(f, "group closure exceeded bound {bound}")
            }
            Error::SpecParse { line, msg } => {
                write!(f, "curve spec parse error at line {line}: {msg}")
            }
            Error::Io(e) => write!(f, "io error: {e}"),
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

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
