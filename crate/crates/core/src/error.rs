use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid single-interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("single-intervals are not sorted and strictly disjoint")]
    NotCanonical,
    #[error("invalid shape: {0}")]
    InvalidShape(&'static str),
    #[error("operation requires a non-empty multiple-interval")]
    EmptyInterval,
    #[error("shape origin {0} must be positive")]
    NonPositiveOrigin(f64),
    #[error("invalid system spec: {0}")]
    InvalidSpec(&'static str),
    #[error("invalid task: {0}")]
    InvalidTask(&'static str),
    #[error("cell (node {node}, receiver {receiver}, step {step}) is already occupied")]
    CellOccupied {
        node: usize,
        receiver: usize,
        step: usize,
    },
    #[error("position does not fit the plan or the configuration weight")]
    PositionMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("LP solver failed: {0}")]
    Solver(&'static str),
}
