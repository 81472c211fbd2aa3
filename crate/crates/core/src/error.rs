use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis index {index} exceeds order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("random variable {xi} lies outside [-1, 1]")]
    OutsideDomain { xi: f64 },

    #[error("quadrature rule needs at least one node")]
    EmptyRule,

    #[error("inadmissible state (density {density:e}, pressure {pressure:e}) at xi = {xi}")]
    Inadmissible { density: f64, pressure: f64, xi: f64 },

    #[error("gPC state leaves the admissible set at xi = {xi}")]
    GpcInadmissible { xi: f64 },

    #[error("path state s = {s} leaves the admissible set at xi = {xi}")]
    PathInadmissible { s: f64, xi: f64 },

    #[error("cell {cell}: {source}")]
    InCell {
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {source}")]
    OnLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("loss of hyperbolicity: symmetric factorization failed at pivot {pivot} (value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("cell average cannot be repaired: mean mode is itself inadmissible at xi = {xi}")]
    UnrecoverableMean { xi: f64 },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("Riemann data generate vacuum (pressure positivity condition violated)")]
    Vacuum,

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("collocation node {node} (xi = {xi}) failed: {source}")]
    CollocationNode {
        node: usize,
        xi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_cell(self, cell: usize) -> Self {
        Error::InCell {
            cell,
            source: Box::new(self),
        }
    }

    pub(crate) fn on_line(self, line: usize) -> Self {
        Error::OnLine {
            line,
            source: Box::new(self),
        }
    }
}
