use thiserror::Error;

pub type Result<T, E = CadError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CadError {
    /// Caller error: bad arguments, mismatched orders, wrong degrees.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable '{0}'")]
    UnknownVariable(String),

    #[error("unassigned free variable '{0}'")]
    Unassigned(String),

    /// A projection factor vanished identically over a positive-dimensional
    /// cell; McCallum projection is not valid for this order.
    #[error("well-orientedness failure: {poly} nullifies over cell {cell:?}; try another variable order")]
    NotWellOriented { poly: String, cell: Vec<u32> },

    /// A polynomial vanished identically at a sample point.
    #[error("polynomial vanishes identically at the sample point")]
    Nullified,

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("point {0} does not satisfy the formula")]
    PointNotFree(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CadError {
    fn from(e: std::io::Error) -> Self {
        CadError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CadError {
    fn from(e: serde_json::Error) -> Self {
        CadError::Io(e.to_string())
    }
}
