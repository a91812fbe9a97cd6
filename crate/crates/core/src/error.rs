use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} needs {requested} qubits but the cap is {cap}")]
    ResourceCap {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate support {0:?} contains a repeated qubit")]
    OverlappingSupport(Vec<usize>),

    #[error("two-qubit gate on ({0}, {1}) is not nearest-neighbour; route it first")]
    UnroutedGate(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("realization index {index} out of range (n_realizations = {n})")]
    RealizationOutOfRange { index: usize, n: usize },

    #[error("series length {0} must be at least 8 and divisible by 4")]
    SpectrumLength(usize),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("calibration matrix for qubit {0} is singular")]
    SingularCalibration(usize),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
