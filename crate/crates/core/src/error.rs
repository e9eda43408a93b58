use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable count {0} outside [1, 20]")]
    VariableCount(usize),
    #[error("table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("negative probability {value} at assignment {assignment}")]
    NegativeProbability { assignment: String, value: f64 },
    #[error("unnormalized: probabilities sum to {sum} (deviation above 1e-6)")]
    Unnormalized { sum: f64 },
    #[error("duplicate assignment key {0:?}")]
    DuplicateAssignment(String),
    #[error("malformed assignment key {key:?}: {reason}")]
    MalformedAssignment { key: String, reason: String },

    #[error("grid needs at least one cell")]
    NoCells,
    #[error("empty interval [{lo}, {hi}]")]
    EmptyInterval { lo: usize, hi: usize },
    #[error("interval [{lo}, {hi}] outside [1, {cells}]")]
    IntervalOutOfRange { lo: usize, hi: usize, cells: usize },

    #[error("weight vector needs at least two coefficients, got {0}")]
    WeightLength(usize),
    #[error("weight coefficient a{index} = {value} outside [0, 1]")]
    WeightOutOfRange { index: usize, value: f64 },

    #[error("requires p > q > 0 and p <= 1 (got p = {p}, q = {q})")]
    InvalidReliability { p: f64, q: f64 },
    #[error("likelihood ratio must lie in (0, 1], got {0}")]
    InvalidLikelihoodRatio(f64),
    #[error("degenerate distribution: acceptance denominator is zero")]
    DegenerateDistribution,
    #[error("coherence undefined (zero expectation measure a0)")]
    ZeroExpectation,
    #[error("incomparable sizes: n = {0} vs n = {1}")]
    SizeMismatch(usize, usize),
    #[error("probe resolution must be at least 99, got {0}")]
    ProbeResolution(usize),
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),

    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("duplicate node {0:?}")]
    DuplicateNode(String),
    #[error("cycle detected through node {0:?}")]
    Cycle(String),
    #[error("node {node:?}: CPT has {found} rows, expected {expected}")]
    CptArity {
        node: String,
        expected: usize,
        found: usize,
    },
    #[error("node {node:?}: CPT entry {value} outside [0, 1]")]
    CptRange { node: String, value: f64 },
    #[error("duplicate evidence for node {0:?}")]
    DuplicateEvidence(String),
    #[error("query node {0:?} is also observed")]
    QueryObserved(String),
    #[error("impossible evidence (probability zero)")]
    ImpossibleEvidence,
    #[error("node sets overlap at {0:?}")]
    OverlappingSets(String),
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
