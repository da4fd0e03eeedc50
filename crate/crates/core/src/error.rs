use alloc::string::String;

/// Errors raised by the estimators and transforms in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("no decay signal: initial indoor-outdoor difference is {0} °F")]
    NoDecaySignal(f64),
    #[error("solver did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("zero variance in regressor")]
    ZeroVariance,
    #[error("non-physical slope {0}")]
    NonPhysicalSlope(f64),
    #[error("rank deficient design: rank {rank} of {columns} columns")]
    RankDeficient { rank: usize, columns: usize },
    #[error("interaction cell {0} has no observations")]
    EmptyCell(String),
    #[error("need at least 2 clusters, got {0}")]
    DegenerateClusters(usize),
}

impl Error {
    /// True for failures of the numerics (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::RankDeficient { .. }
                | Error::EmptyCell(_)
                | Error::DegenerateClusters(_)
                | Error::ZeroVariance
                | Error::NonPhysicalSlope(_)
                | Error::NoDecaySignal(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
