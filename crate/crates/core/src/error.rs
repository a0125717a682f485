use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("infeasible assignment: {users} users but only {slots} legal slots")]
    InfeasibleAssignment { users: usize, slots: usize },
    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
