use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("template length {template} exceeds data length {data}")]
    LengthMismatch { template: usize, data: usize },

    #[error("sample rate mismatch: template {template} Hz, data {data} Hz")]
    SampleRateMismatch { template: f64, data: f64 },

    #[error("series must contain at least one sample")]
    EmptySeries,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("zero norm: shifted values sum to zero")]
    ZeroNorm,

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("lag {lag} out of range (max {max})")]
    LagOutOfRange { lag: usize, max: usize },

    #[error("qubit registers overlap")]
    OverlappingRegisters,

    #[error("circuit needs {requested} qubits, cap is {cap}")]
    QubitCapExceeded { requested: usize, cap: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("bitstring width {found} does not match layout width {expected}")]
    BitstringWidth { expected: usize, found: usize },

    #[error("infeasible segment plan: {0}")]
    InfeasiblePlan(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
