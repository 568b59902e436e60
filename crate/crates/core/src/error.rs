use thiserror::Error;

/// Broad class of a failure, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input violates a precondition of the requested operation.
    Domain,
    /// An iterative method ran out of budget.
    NonConvergence,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generating vector must have at least one entry")]
    EmptyVector,
    #[error("entry {index} (0-based) of the generating vector is not a positive finite number ({value})")]
    NonPositiveEntry { index: usize, value: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix rows have inconsistent lengths")]
    RaggedRows,
    #[error("matrix entry ({i}, {j}) (0-based) is not finite")]
    NonFiniteEntry { i: usize, j: usize },
    #[error("matrix is not symmetric at ({i}, {j}) (0-based)")]
    NotSymmetric { i: usize, j: usize },
    #[error("diagonal entry {index} (0-based) is nonzero ({value})")]
    NonzeroDiagonal { index: usize, value: f64 },
    #[error("entry ({i}, {j}) (0-based) is inconsistent with any x_i + x_j decomposition")]
    InconsistentEntries { i: usize, j: usize },
    #[error("the only candidate generating vector has a nonpositive entry {index} (0-based), {value}")]
    NonPositiveSolution { index: usize, value: f64 },
    #[error("a 1x1 matrix does not determine its generating vector")]
    Underdetermined,
    #[error("index {index} is out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("value {value} occurs only once; every group needs at least two members")]
    SingletonGroup { value: f64 },
    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),
    #[error("matrix order {order} exceeds the limit of {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("polynomial must be monic with degree at least 1")]
    InvalidPolynomial,
    #[error("{method} did not converge within {iterations} iterations")]
    NoConvergence { method: &'static str, iterations: usize },
    #[error("root {re} + {im}i is not real within tolerance")]
    ComplexRoot { re: f64, im: f64 },
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("radicand is negative ({0})")]
    NegativeRadicand(f64),
    #[error("sign condition violated: {0}")]
    SignCondition(String),
    #[error("construction check failed: {0}")]
    VerificationFailed(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NoConvergence { .. } => ErrorKind::NonConvergence,
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
