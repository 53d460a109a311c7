use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("columns are not orthonormal (deviation {deviation:e})")]
    NotIsometry { deviation: f64 },

    #[error("isometry has {cols} columns but the target dimension is {target}")]
    TooManyColumns { cols: usize, target: usize },

    #[error("eigenvalue {value:e} is negative beyond tolerance")]
    NegativeEigenvalue { value: f64 },

    #[error("state set is empty")]
    EmptySet,

    #[error("state {index} has norm {norm}, expected 1")]
    NotNormalized { index: usize, norm: f64 },

    #[error("Gram matrix diagonal entry {index} is {value}, expected 1")]
    NotUnitDiagonal { index: usize, value: f64 },

    #[error("rank {rank} exceeds the available dimension {dim}")]
    RankExceedsDimension { rank: usize, dim: usize },

    #[error("certificate does not match the state set: {0}")]
    CertificateMismatch(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("no masking circle found for the qubit triple")]
    Infeasible,
}
