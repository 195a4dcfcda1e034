use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown node {node} (graph has {node_count} nodes)")]
    UnknownNode { node: usize, node_count: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("node {0} has an empty color set")]
    EmptyColorSet(usize),

    #[error("unknown color `{0}`")]
    UnknownColor(String),

    #[error("color assignment covers {assignment} nodes but the graph has {graph}")]
    NodeCountMismatch { graph: usize, assignment: usize },

    #[error("infeasible joint strategy: node {node} cannot play color `{color}`")]
    Infeasible { node: usize, color: String },

    #[error("profile has {got} entries but the game has {expected} players")]
    ProfileLength { expected: usize, got: usize },

    #[error("structural precondition violated: {0}")]
    Structural(String),

    #[error("search space of {required} candidates exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("deviation is not profitable: {0}")]
    NotProfitable(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
