use crate::mrf::VertexId;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spin domain must have q >= 2, got {0}")]
    BadDomain(usize),
    #[error("potential has {got} entries, expected {expected}")]
    BadArity { expected: usize, got: usize },
    #[error("potential contains NaN or +inf")]
    InvalidWeight,
    #[error("edge potential is not symmetric at ({a}, {b})")]
    AsymmetricEdge { a: usize, b: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {{{0}, {1}}}")]
    UnknownEdge(VertexId, VertexId),
    #[error("vertex {0} is not isolated")]
    NotIsolated(VertexId),
    #[error("invalid update batch: {0}")]
    InvalidBatch(String),
    #[error("all spins have zero weight at vertex {0}")]
    InfeasibleNeighborhood(VertexId),
    #[error("boundary does not assign neighbor {neighbor} of vertex {vertex}")]
    MissingBoundary { vertex: VertexId, neighbor: VertexId },
    #[error("spin domains differ: {0} vs {1}")]
    DomainMismatch(usize, usize),
    #[error("vertex {vertex} has degree {degree}, above the enumeration cap {cap}")]
    DegreeTooLarge { vertex: VertexId, degree: usize, cap: usize },
    #[error("probability vector is not normalized (sum = {0})")]
    NotNormalized(f64),
    #[error("conditioning spin {0} has zero probability")]
    ZeroProbabilityCondition(usize),
    #[error("local views have different neighborhoods")]
    NeighborMismatch,
    #[error("rank {rank} out of range for log of length {len}")]
    RankOutOfRange { rank: usize, len: usize },
    #[error("vertex {0} still has transitions in the log")]
    VertexHasTransitions(VertexId),
    #[error("instance violates the feasibility assumption at vertex {0}")]
    InfeasibleInstance(VertexId),
    #[error("vertex or edge sets differ between instances")]
    GraphMismatch,
    #[error("vertex sets differ between instances")]
    VertexSetMismatch,
    #[error("potential of a shared vertex or edge differs")]
    SharedPotentialMismatch,
    #[error("posterior condition was never observed in the samples")]
    EmptyPosteriorCondition,
    #[error("diff entry for chain {chain}, vertex {vertex} does not match the maintained sample")]
    DiffInconsistent { chain: usize, vertex: VertexId },
    #[error("diff covers {got} chains, estimator holds {expected}")]
    ChainCountMismatch { expected: usize, got: usize },
    #[error("no complete sample to estimate from")]
    NoSamples,
    #[error("configuration space too large: {0} states")]
    TooLarge(f64),
    #[error("distributions live on different configuration spaces")]
    SpaceMismatch,
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("instance is outside the model regime: {0}")]
    RegimeViolation(String),
}
