use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate register name `{0}`")]
    DuplicateRegister(String),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("register `{0}` has zero dimension")]
    ZeroDimension(String),
    #[error("joint dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("state not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("matrix not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("density operator trace {trace} != 1")]
    BadTrace { trace: f64 },
    #[error("operator not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("action V_{index} not unitary (max deviation {deviation:e})")]
    NonUnitaryAction { index: usize, deviation: f64 },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("outcome {index} has zero probability")]
    ZeroProbability { index: usize },
    #[error("operator acts on Alice register `{0}`")]
    AliceRegister(String),
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    #[error("bound violated: {0}")]
    BoundViolation(String),
}
