use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Instance(String),

    /// No candidate set satisfies the covering constraint at this step.
    #[error("no feasible set for covering constraint at step {step}")]
    InfeasibleStep { step: usize },

    #[error("invalid certificate: {0}")]
    Certificate(String),

    #[error("oracle support of size {size} exceeds the cap of {cap}")]
    OracleCapacity { size: usize, cap: usize },

    #[error("{what} of size {size} exceeds the brute-force cap of {cap}")]
    Capacity {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("tree has {vertices} vertices, at least 3 are required")]
    TreeTooSmall { vertices: usize },

    #[error("constraint stream exhausted")]
    StreamEnd,

    #[error("instance is infeasible")]
    Infeasible,

    /// Demand that no budget can serve, e.g. the only routes need a
    /// degree-1 vertex as an interior vertex.
    #[error("demand {demand} cannot be routed under any weight budget")]
    Unservable { demand: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn instance(msg: impl Into<String>) -> Self {
        Error::Instance(msg.into())
    }
}
