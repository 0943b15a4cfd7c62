use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A generator or estimator was called with parameters outside its domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Caller-supplied data (seed sets, node ids, grids) is unusable.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("exact enumeration over {edges} edges exceeds the budget of {limit}")]
    Budget { edges: usize, limit: usize },

    #[error("no percolation transition: <k^2> = {second_moment} <= <k> = {mean}")]
    UndefinedTransition { mean: f64, second_moment: f64 },

    #[error("degenerate optimization time T = {0} (must exceed 1)")]
    DegenerateCost(f64),

    #[error("power-law fit failed: {0}")]
    Fit(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge list contains no edges")]
    EmptyGraph,

    #[error("configuration invalid: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used for process exit codes and machine-readable reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Runtime,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::Parameter(_) => ErrorKind::Config,
            Error::Parse { .. } | Error::EmptyGraph | Error::Graph(_) | Error::Io(_) => {
                ErrorKind::Data
            }
            _ => ErrorKind::Runtime,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::Input(_) => "input",
            Error::Graph(_) => "graph",
            Error::Generation(_) => "generation",
            Error::Budget { .. } => "budget",
            Error::UndefinedTransition { .. } => "undefined_transition",
            Error::DegenerateCost(_) => "degenerate_cost",
            Error::Fit(_) => "fit",
            Error::Parse { .. } => "parse",
            Error::EmptyGraph => "empty_graph",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
