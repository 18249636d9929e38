use alloc::string::String;

use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge {0}-{1} has non-positive or non-finite weight {2}")]
    InvalidWeight(VertexId, VertexId, f64),
    #[error("edge {0}-{1} listed twice")]
    DuplicateEdge(VertexId, VertexId),
    #[error("symmetry violation: edge {0}-{1} listed with weights {2} and {3}")]
    AsymmetricEdge(VertexId, VertexId, f64, f64),
    #[error("invalid keyword token {0:?}")]
    InvalidKeyword(String),
    #[error("graph uses {found} distinct keywords but declares a domain of {declared}")]
    KeywordDomainExceeded { declared: usize, found: usize },
    #[error("vertex set is empty")]
    EmptyVertexSet,
    #[error("query graph must have at least 2 vertices, found {0}")]
    QueryTooSmall(usize),
    #[error("query graph is not connected")]
    QueryNotConnected,
    #[error("mapping does not cover query vertex {0}")]
    MappingNotTotal(VertexId),
    #[error("mapping is not injective: data vertex {0} used twice")]
    MappingNotInjective(VertexId),
    #[error("query vertex {query} is mapped to {mapped}, not {given}")]
    MappingMismatch {
        query: VertexId,
        mapped: VertexId,
        given: VertexId,
    },
    #[error("oracle refuses {vertices} data vertices (cap {cap})")]
    OracleCapExceeded { vertices: usize, cap: usize },
    #[error("unknown keyword {0:?}")]
    UnknownKeyword(String),
    #[error("duplicate keyword {0:?}")]
    DuplicateKeyword(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite embedding component for keyword {0:?}")]
    NonFiniteEmbedding(String),
    #[error("embedding dimension must be at least {min}, got {got}")]
    InvalidDimension { min: usize, got: usize },
    #[error("log-area of the empty-set MBR is undefined")]
    SentinelArea,
    #[error("lower bound over an empty list")]
    EmptyList,
    #[error("fanout must be at least 2, got {0}")]
    InvalidFanout(usize),
    #[error("cannot build an index over no vertices")]
    EmptyAux,
    #[error("{0} fingerprint mismatch")]
    FingerprintMismatch(&'static str),
    #[error("unknown hyperedge {0}")]
    UnknownHyperedge(usize),
    #[error("hypergraph needs at least 2 hyperedges, found {0}")]
    TooFewHyperedges(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("random walk failed to collect {0} distinct vertices")]
    WalkFailed(usize),
}
