use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("density matrix trace {trace} is not 1")]
    BadTrace { trace: f64 },
    #[error("density matrix has negative eigenvalue {eigenvalue:e}")]
    NegativeSpectrum { eigenvalue: f64 },
    #[error("invalid spin j = {doubled}/2: 2j must be a positive integer")]
    InvalidSpin { doubled: i64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("{qubits} qubits is too many for the tensor-product oracle (max {max})")]
    OracleTooLarge { qubits: usize, max: usize },
    #[error("invalid qubit selection: {0}")]
    BadQubitSelection(String),
    #[error("two-qubit reduction needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("3-tangle is defined only for 3 qubits (2j = 3), got 2j = {0}")]
    TangleUndefined(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
