use alloc::string::String;

use thiserror::Error;

use crate::chart::ChartPoint;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point} rejected: {reason}")]
    Domain { point: ChartPoint, reason: &'static str },

    #[error("evaluation failed at {point}: {reason}")]
    Evaluation { point: ChartPoint, reason: &'static str },

    #[error("degree overflow: {0} + {1} exceeds 4")]
    DegreeOverflow(usize, usize),

    #[error("operation not defined for a form of degree {0}")]
    BadDegree(usize),

    #[error("singular matrix at {point}")]
    Singular { point: ChartPoint },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
