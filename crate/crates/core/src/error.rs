use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),

    #[error("node identifiers must be nonempty")]
    EmptyNodeId,

    #[error("duplicate node `{0}`")]
    DuplicateNode(NodeId),

    #[error("self-loop on `{0}`")]
    SelfLoop(NodeId),

    #[error("duplicate arrow {0} -> {1}")]
    DuplicateArrow(NodeId, NodeId),

    #[error("graph contains a directed cycle through `{0}`")]
    Cycle(NodeId),

    #[error("formula of `{node}` mentions `{var}`, which is not a successor")]
    NotASuccessor { node: NodeId, var: NodeId },

    #[error("formula of `{node}` does not mention successor `{succ}`")]
    UnmentionedSuccessor { node: NodeId, succ: NodeId },

    #[error("arrow {node} -> {succ} has sign {arrow} but the formula uses the literal with sign {literal}")]
    SignMismatch {
        node: NodeId,
        succ: NodeId,
        arrow: crate::graph::Sign,
        literal: crate::graph::Sign,
    },

    #[error("non-sink node `{0}` has no formula")]
    MissingFormula(NodeId),

    #[error("sink node `{0}` carries a formula")]
    SinkWithFormula(NodeId),

    #[error("formula of `{0}` contains a frontier leaf; graph formulas must be classical")]
    FrontierInGraph(NodeId),

    #[error("conjunctions and disjunctions need at least one operand")]
    EmptyConnective,

    #[error("no binding for variable `{0}`")]
    Unassigned(String),

    #[error("frontier leaf `{0}` cannot be evaluated classically")]
    FrontierInClassical(String),

    #[error("DNF blow-up: {size} exceeds the cap of {cap}")]
    DnfTooLarge { size: u128, cap: u128 },

    #[error("{count} sinks exceed the enumeration limit of {limit}")]
    SinkLimit { count: usize, limit: usize },

    #[error("expected a single sink, found {0}")]
    NotSingleSink(usize),

    #[error("`{0}` is not a sink")]
    NotASink(NodeId),

    #[error("no arrow {0} -> {1}")]
    NoSuchArrow(NodeId, NodeId),

    #[error("variant {0} does not satisfy all three cell conditions")]
    VariantNotOk(String),

    #[error("build step {index} ({step}) is not applicable: {reason}")]
    InapplicableStep {
        index: usize,
        step: String,
        reason: String,
    },

    #[error("yablo truncation needs n >= 2, got {0}")]
    TruncationTooSmall(usize),

    #[error("invalid injection: {0}")]
    InvalidInjection(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid document: {0}")]
    Document(String),
}
