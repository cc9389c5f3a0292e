//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix tuple is empty")]
    EmptyTuple,

    #[error("tuple entries have mismatched shapes: {0}")]
    ShapeMismatch(String),

    #[error("alphabet size d must be at least 1")]
    ZeroAlphabet,

    #[error("letter {letter} outside alphabet 1..={d}")]
    LetterOutOfRange { letter: u8, d: usize },

    #[error("not a row contraction: lambda_max = {lambda_max:.6e}")]
    NotContractive { lambda_max: f64 },

    #[error("eigenvalue {value:.6e} below -{tol:.1e}: matrix is not positive semidefinite")]
    NotPsd { value: f64, tol: f64 },

    #[error("iteration did not converge in {iterations} steps (last difference {last_diff:.3e})")]
    NoConvergence { iterations: usize, last_diff: f64 },

    #[error("gamma is not a contraction: norm = {norm:.6e}")]
    GammaNotContractive { norm: f64 },

    #[error("defect dimensions incompatible: expected {expected}, got {got}")]
    DefectDimMismatch { expected: usize, got: usize },

    #[error("lifting block B admits no defect-coordinate factorization (residual {residual:.3e})")]
    MalformedLifting { residual: f64 },

    #[error("lifting is not reduced: invariant kernel has dimension {kernel_dim}")]
    NotReduced { kernel_dim: usize },

    #[error("tuple is not completely non-coisometric: H1 has dimension {h1_dim}")]
    NotCnc { h1_dim: usize },

    #[error("symbol is not inner: isometry defect {defect:.3e}")]
    NotInner { defect: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not a fixed point: residual {residual:.3e}")]
    NotFixed { residual: f64 },

    #[error("state is not invariant: residual {residual:.3e}")]
    NotInvariant { residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("linear algebra backend failure: {0}")]
    Backend(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Backend(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
