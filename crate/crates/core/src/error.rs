use thiserror::Error;

pub type Result<T, E = RaagError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RaagError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("word of length {len} exceeds the conjugacy length guard {guard}")]
    LengthGuard { len: usize, guard: usize },
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("compatibility is undefined for a partition and itself")]
    IdenticalPartitions,
    #[error("no side exchange satisfies the quadrant hypotheses")]
    QuadrantHypotheses,
    #[error("automorphisms live on different graphs ({0} vs {1} vertices)")]
    GraphMismatch(usize, usize),
    #[error("target lists differ in length ({0} vs {1})")]
    TargetMismatch(usize, usize),
    #[error("{what} cap of {cap} exceeded")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("computation leaves the ball: {0}")]
    Clipped(String),
    #[error("no displacement witness within radius {radius} (bound M = {bound})")]
    NoWitness { radius: usize, bound: f64 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
