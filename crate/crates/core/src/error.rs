use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh needs at least 3 points, got {0}")]
    MeshTooSmall(usize),

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    /// The heat state left the domain of the Cole transform.
    #[error("heat state is not strictly positive: min {min} at index {index}")]
    NonPositiveState { min: f64, index: usize },

    #[error("Dirichlet condition violated: u(0) = {left}, u(1) = {right}")]
    BoundaryViolation { left: f64, right: f64 },

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("initial datum outside the uniform-convergence region (norm {norm_u0})")]
    RegionViolation { norm_u0: f64 },

    #[error("time step halved {levels} times without meeting the CFL bound at t = {t}")]
    UnstableStep { levels: u32, t: f64 },

    #[error("requested rank {requested} exceeds numerical rank {available}")]
    RankDeficient { requested: usize, available: usize },

    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
