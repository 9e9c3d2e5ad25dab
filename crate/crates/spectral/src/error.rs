use thiserror::Error;

/// Crate-wide error type. Node ids in messages are 1-based, matching the
/// edge-list format and all exported indices.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data is structurally unusable (non-finite entries, empty set,
    /// nonpositive step sizes and the like).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A graph recipe parameter is out of range.
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),

    /// An edge list violates the format contract.
    #[error("invalid edge list: {0}")]
    InvalidEdgeList(String),

    /// Node with zero degree where a normalized operator needs d_i > 0.
    #[error("isolated node {0} has zero degree")]
    IsolatedNode(usize),

    /// Matrix handed to the symmetric eigensolver is not symmetric.
    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,

    /// Jacobi sweeps exhausted before the off-diagonal norm converged.
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    /// Dimension mismatch or an index/count outside its valid range.
    #[error("shape error: {0}")]
    ShapeError(String),

    /// Discrete diffusion step size at or beyond the divergence threshold.
    #[error("unstable step: dt = {dt} exceeds stability limit {limit}")]
    UnstableStep { dt: f64, limit: f64 },

    /// Operation requires a connected graph.
    #[error("graph has {components} connected components; embed each component separately or use spectral clustering")]
    DisconnectedGraph { components: usize },

    /// Constraint matrix of the projected eigenproblem is rank-deficient.
    #[error("singular constraint matrix: numerical rank {rank} is below the requested dimension")]
    SingularConstraint { rank: usize },

    /// Unsupported feature expansion request.
    #[error("invalid expansion: {0}")]
    InvalidExpansion(String),

    /// Text input that does not parse (CSV fields, edge-list lines).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidData(_) => "InvalidData",
            Error::InvalidRecipe(_) => "InvalidRecipe",
            Error::InvalidEdgeList(_) => "InvalidEdgeList",
            Error::IsolatedNode(_) => "IsolatedNode",
            Error::NotSymmetric => "NotSymmetric",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::ShapeError(_) => "ShapeError",
            Error::UnstableStep { .. } => "UnstableStep",
            Error::DisconnectedGraph { .. } => "DisconnectedGraph",
            Error::SingularConstraint { .. } => "SingularConstraint",
            Error::InvalidExpansion(_) => "InvalidExpansion",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
