use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph has no edges; the sampling pmf is undefined")]
    NoEdges,

    #[error("pmf entry for edge {edge} is {value}; every edge needs positive probability")]
    NonPositivePmf { edge: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("not a spectral approximation: kernel vector leaks {leak:.3e} > {tol:.3e}")]
    KernelNotContained { leak: f64, tol: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("register budget of {needed} qubits exceeds cap {cap}")]
    RegisterCap { needed: u32, cap: u32 },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("row {row} out of range for dimension {n}")]
    RowOutOfRange { row: usize, n: usize },

    #[error("data register overflow: {0}")]
    RegisterOverflow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

impl Error {
    /// Process exit code: 3 for bad input or I/O, 4 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::KernelNotContained { .. } | Error::Numeric(_) | Error::RegisterOverflow(_) => EXIT_NUMERIC,
            _ => EXIT_INPUT,
        }
    }
}
