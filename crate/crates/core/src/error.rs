use alloc::string::String;

use crate::combinatorics::Subset;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate channel: nulled users {nulled} have smallest singular value {sigma_min:e}")]
    DegenerateChannel { nulled: Subset, sigma_min: f64 },

    #[error("singular gain {gain:e} for user {user} on subset {target}")]
    SingularGain { user: usize, target: Subset, gain: f64 },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subset {subset} has size {got}, expected {expected}")]
    SubsetSize { subset: Subset, expected: usize, got: usize },

    #[error("expected {expected} gains, got {got}")]
    GainCount { expected: usize, got: usize },

    #[error("no beam for target {0}")]
    MissingBeam(Subset),

    #[error("degrees of freedom undefined for M >= N")]
    FullCache,
}
