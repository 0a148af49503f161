use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] mldr_core::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error("not enough shares: need {need}, got {got}")]
    NotEnoughShares { need: usize, got: usize },
    #[error("simulation fault: {0}")]
    SimulationFault(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("invalid input: {0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
