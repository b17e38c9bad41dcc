use thiserror::Error;

use crate::graph::VertexId;
use crate::label::Label;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseLabelError {
    #[error("empty label")]
    Empty,
    #[error("label {0:?} is not finite")]
    NonFinite(String),
    #[error("label {0:?} has a zero denominator")]
    ZeroDenominator(String),
    #[error("label {0:?} is not a decimal or p/q fraction")]
    Malformed(String),
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex ids must be non-empty")]
    EmptyId,
    #[error("duplicate vertex id {0}")]
    DuplicateId(VertexId),
    #[error("duplicate label {label} on vertices {first} and {second}")]
    DuplicateLabel {
        label: Label,
        first: VertexId,
        second: VertexId,
    },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("invalid Reeb graph: {0}")]
    Invalid(String),
    #[error(transparent)]
    Label(#[from] ParseLabelError),
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum EditError {
    #[error("precondition {rule} violated: {details}")]
    PreconditionViolated { rule: &'static str, details: String },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("label {label} collides with vertex {holder}")]
    LabelCollision { label: Label, holder: VertexId },
    #[error("vertex id {0} is already in use")]
    IdInUse(VertexId),
    #[error("inconsistent before/after pair: {0}")]
    Inconsistent(String),
    #[error("operation {index} failed: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<EditError>,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl EditError {
    pub(crate) fn pre(rule: &'static str, details: impl Into<String>) -> Self {
        EditError::PreconditionViolated {
            rule,
            details: details.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CanonError {
    #[error("endpoints must both be minima or both be maxima ({0} and {1} differ)")]
    ClassMismatch(VertexId, VertexId),
    #[error("endpoints must be distinct vertices")]
    SameVertex,
    #[error("not a simple cycle: {0}")]
    NotACycle(String),
    #[error("step budget of {0} operations exhausted")]
    BudgetExhausted(usize),
    #[error("genus mismatch {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error)]
pub enum DistanceError {
    #[error("genus mismatch {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("operation {0} of the deletion sequence is not a death")]
    NotAllDeaths(usize),
    #[error("epsilon {eps} must lie in (0, {bound})")]
    EpsilonOutOfRange { eps: Box<Label>, bound: Box<Label> },
    #[error("search parameters must be positive: {0}")]
    BadParams(&'static str),
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("oracle supports at most {cap} points per type, got {got}")]
    OracleCapExceeded { cap: usize, got: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("delta {delta} is not below half the minimum label gap {half_gap}")]
    DeltaTooLarge { delta: Box<Label>, half_gap: Box<Label> },
    #[error("delta must be non-negative")]
    NegativeDelta,
    #[error("bound violated on trial {trial}: upper {upper} > delta {delta}")]
    BoundViolated {
        trial: usize,
        upper: Box<Label>,
        delta: Box<Label>,
    },
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
