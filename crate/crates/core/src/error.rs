use crate::normgeom::GraphPoint;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum MonoError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unsupported dimension {0} for this output")]
    UnsupportedDimension(usize),
    #[error("graph has no points inside the requested box")]
    EmptyGraph,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("hypomonotonicity ratio diverges along {} sampled pairs", .pairs.len())]
    Unbounded { pairs: Vec<(GraphPoint, GraphPoint)> },
    #[error("solver limit reached at grid spacing {finest}")]
    SolverLimit { finest: f64 },
    #[error("point does not belong to the set")]
    PointNotInSet,
    #[error("unknown catalog name `{0}`")]
    UnknownName(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
}

impl MonoError {
    /// Stable upper-case code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            MonoError::InvalidInput(_) => "INVALID_INPUT",
            MonoError::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            MonoError::Unsupported(_) => "UNSUPPORTED",
            MonoError::UnsupportedDimension(_) => "UNSUPPORTED_DIMENSION",
            MonoError::EmptyGraph => "EMPTY_GRAPH",
            MonoError::Degenerate(_) => "DEGENERATE",
            MonoError::Unbounded { .. } => "UNBOUNDED",
            MonoError::SolverLimit { .. } => "SOLVER_LIMIT",
            MonoError::PointNotInSet => "POINT_NOT_IN_SET",
            MonoError::UnknownName(_) => "UNKNOWN_NAME",
            MonoError::BadParams(_) => "BAD_PARAMS",
        }
    }
}

pub type Result<T> = std::result::Result<T, MonoError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(MonoError::DimensionMismatch { expected, found });
    }
    Ok(())
}
