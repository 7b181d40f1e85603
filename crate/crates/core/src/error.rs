use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("label out of range: {0}")]
    LabelOutOfRange(String),

    #[error("empty sector 2j = {twice_j}: weight {weight:e} is below 1e-14")]
    EmptySector { twice_j: i64, weight: f64 },

    #[error("degenerate frame: (mu, nu) = (0, 0)")]
    DegenerateFrame,

    #[error("ordering parameter s = {0} outside (0, 1)")]
    OrderingOutOfDomain(f64),

    #[error("Fock cutoff {cutoff} too small: {reason}")]
    CutoffTooSmall { cutoff: usize, reason: String },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: String, found: String },

    #[error("quadrature insufficient: {0}")]
    InsufficientQuadrature(String),

    #[error("numerical consistency failure: {0}")]
    Numerical(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
