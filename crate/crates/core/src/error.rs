use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision error: {0}")]
    Precision(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("invalid exponent sequence: {0}")]
    InvalidSequence(String),

    #[error("gcd({h}, {k}) = {gcd}, expected a coprime pair")]
    Gcd { h: u64, k: u64, gcd: u64 },

    #[error("singular direction field at {re}+{im}i")]
    Singular { re: f64, im: f64 },

    #[error("point {re}+{im}i lies inside a branch-ray guard band")]
    Branch { re: f64, im: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("step control underflow at {re}+{im}i (step {step:e})")]
    StepFailure { re: f64, im: f64, step: f64 },

    #[error("iteration failed to converge: {0}")]
    Convergence(String),

    #[error("no points survive the selection: {0}")]
    EmptySelection(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Io(err.to_string())
    }
}
