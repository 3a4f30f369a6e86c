use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("emitter index {index} out of range for a register of {n_emitters} emitters")]
    EmitterIndex { index: usize, n_emitters: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("partial trace needs at least one kept emitter")]
    EmptyKeepSet,

    #[error("unsupported photon number {0} (supported: 1..=3)")]
    PhotonNumber(usize),

    #[error("unsupported register size {0} (supported: 1..=6)")]
    RegisterSize(usize),

    #[error("malformed hierarchy state: {0}")]
    MalformedState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value encountered at t = {time}")]
    NonFinite { time: f64 },

    #[error("matrix is not hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix trace {trace:.9} is not 1")]
    NotNormalized { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("concurrence triangle inequality violated by {excess:.3e}")]
    TriangleViolation { excess: f64 },

    #[error("unknown population label `{0}`")]
    UnknownLabel(String),

    #[error("empty series or grid")]
    Empty,

    #[error("measure `{measure}` needs {needed} emitters, register has {got}")]
    WrongRegister { measure: &'static str, needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
