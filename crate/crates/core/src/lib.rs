//! Exact subgraph similarity search over weighted, keyword-labeled graphs.
//!
//! A query graph `q` matches a connected subgraph `g` of the data graph when
//! there is an injective vertex mapping under which every query keyword set
//! is contained in its data vertex's keyword set, and the generalized
//! neighbor difference (GND) of the mapping stays within a threshold.
//!
//! The crate is `no_std` (with `alloc`). File formats, the CLI and
//! benchmarking live in the `s3gnd` companion crate.
//!
//! Module map:
//! - [`graph`]: weighted keyword graphs, neighborhoods, induced subgraphs.
//! - [`gnd`]: ND/GND scoring, the answer predicate and a brute-force oracle.
//! - [`hypergraph`]: keyword hypergraph and training pair sampling.
//! - [`mbr`]: keyword embeddings and bounding-box geometry.
//! - [`bounds`]: sorted weight lists, lower bounds and pruning predicates.
//! - [`index`]: the hierarchical tree index over per-vertex auxiliary data.
//! - [`query`]: candidate retrieval and stack-based refinement.
//! - [`workload`]: small-world graph and query workload generation.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod fingerprint;
pub mod gnd;
pub mod graph;
pub mod hypergraph;
pub mod index;
pub mod mbr;
pub mod query;
pub mod workload;

pub use bounds::{SortedWeightList, VertexAux};
pub use error::{Error, Result};
pub use fingerprint::Fingerprint;
pub use gnd::{Aggregate, Answer, QueryParams, VertexMapping};
pub use graph::{Graph, GraphBuilder, KeywordSet, QueryGraph, VertexId};
pub use hypergraph::{KeywordHypergraph, PairDataset};
pub use index::{BuildConfig, IndexNode, TreeIndex};
pub use mbr::{EmbeddingTable, Mbr};
pub use query::{CandidateSets, PruneConfig, QueryEngine, QueryStats};
