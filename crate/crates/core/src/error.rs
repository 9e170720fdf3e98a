use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),

    #[error("cycle detected through node `{0}`")]
    Cycle(String),

    #[error("orphan node `{node}`: {reason}")]
    Orphan { node: String, reason: String },

    #[error("node `{node}` has {children} children, at least {required} required")]
    TooFewChildren {
        node: String,
        children: usize,
        required: usize,
    },

    #[error("negative mass {mass} on leaf `{leaf}`")]
    NegativeMass { leaf: String, mass: f64 },

    #[error("non-finite mass on leaf `{0}`")]
    NonFiniteMass(String),

    #[error("leaf `{0}` has no {1} mass")]
    MissingMass(String, &'static str),

    #[error("mass given for `{0}`, which is not a leaf of the model")]
    NotALeaf(String),

    #[error("model has no nodes")]
    EmptyModel,

    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error("node index {0} out of range")]
    NodeIndex(usize),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("function must be nonnegative, found {value} on leaf {leaf}")]
    NegativeFunction { leaf: usize, value: f64 },

    #[error("coefficient missing for node `{0}`")]
    MissingCoefficient(String),

    #[error("invalid coefficient for node `{node}`: {reason}")]
    InvalidCoefficient { node: String, reason: String },

    #[error("every candidate function has zero L^p(mu) norm")]
    DegenerateCandidates,

    #[error("exhaustive search supports at most {max} leaves, model has {leaves}")]
    TooManyLeaves { leaves: usize, max: usize },

    #[error("leaf `{0}` has positive base mass but zero density; the reduced measure is not finite")]
    InfiniteReducedMass(String),

    #[error("theorem sandwich violated ({side}): {lhs} > {rhs}")]
    SandwichViolation { side: &'static str, lhs: f64, rhs: f64 },

    #[error("proof chain link `{link}` failed: {lhs} > {rhs}")]
    BrokenLink { link: String, lhs: f64, rhs: f64 },

    #[error("reduction identity `{identity}` failed with relative error {error:e}")]
    ReductionMismatch { identity: &'static str, error: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed file: {0}")]
    Format(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
