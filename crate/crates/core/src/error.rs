use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid frequency {0}: frequencies must be strictly positive")]
    InvalidFrequency(f64),

    #[error("incompatible states: {0}")]
    IncompatibleStates(String),

    #[error("index {index} out of range for {len} modes or nodes")]
    IndexError { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("format error at line {line}: {message}")]
    FormatError { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    #[error("potential matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NonPhysicalCoupling { min_eigenvalue: f64 },

    #[error("node {node} is decoupled from normal mode {mode} (overlap {overlap:.3e})")]
    NodeDecoupledFromMode { node: usize, mode: usize, overlap: f64 },

    #[error("fidelity tensor is incomplete: {0}")]
    IncompleteTensor(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
