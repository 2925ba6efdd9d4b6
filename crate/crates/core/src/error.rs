use thiserror::Error;

use crate::model::SolutionReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("invalid solution: {0}")]
    InvalidSolution(SolutionReport),

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("oracle refused: estimated {estimate} feasibility checks exceeds the ceiling of {ceiling}")]
    OracleRefused { estimate: u128, ceiling: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }
}
