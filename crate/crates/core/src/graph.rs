//! Undirected weighted graphs whose vertices carry keyword sets.
//!
//! The same structure backs data graphs and query graphs; [`QueryGraph`]
//! adds the query-side invariants (connected, at least two vertices).

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use core::ops::Deref;

use crate::error::{Error, Result};

pub type VertexId = u64;

/// Keyword set of one vertex, kept sorted for deterministic iteration.
pub type KeywordSet = BTreeSet<String>;

/// Keyword tokens are non-empty, contain no whitespace or commas, and may not
/// be the lone `-` (the file format's empty-set marker).
pub fn is_valid_keyword(token: &str) -> bool {
    !token.is_empty() && token != "-" && !token.chars().any(|c| c.is_whitespace() || c == ',')
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    sigma: usize,
    keywords: BTreeMap<VertexId, KeywordSet>,
    adjacency: BTreeMap<VertexId, BTreeMap<VertexId, f64>>,
}

impl Graph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    /// Declared size of the keyword domain.
    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn vertex_count(&self) -> usize {
        self.keywords.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.keywords.contains_key(&v)
    }

    /// Vertex ids in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.keywords.keys().copied()
    }

    pub fn keywords(&self, v: VertexId) -> Result<&KeywordSet> {
        self.keywords.get(&v).ok_or(Error::UnknownVertex(v))
    }

    /// The 1-hop neighborhood of `v` with edge weights.
    pub fn neighbors(&self, v: VertexId) -> Result<&BTreeMap<VertexId, f64>> {
        self.adjacency.get(&v).ok_or(Error::UnknownVertex(v))
    }

    pub fn degree(&self, v: VertexId) -> Result<usize> {
        self.neighbors(v).map(BTreeMap::len)
    }

    /// Weight of edge `u`-`v`, or `None` when the edge (or a vertex) is absent.
    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<f64> {
        self.adjacency.get(&u).and_then(|n| n.get(&v)).copied()
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.adjacency.iter().flat_map(|(&u, n)| {
            n.range(u + 1..).map(move |(&v, &w)| (u, v, w))
        })
    }

    /// Distinct keywords used by any vertex.
    pub fn keyword_domain(&self) -> BTreeSet<&str> {
        self.keywords
            .values()
            .flat_map(|k| k.iter().map(String::as_str))
            .collect()
    }

    /// Subgraph induced by `vs`: all edges of `self` with both endpoints in `vs`.
    pub fn induced_subgraph(&self, vs: &BTreeSet<VertexId>) -> Result<Graph> {
        let mut keywords = BTreeMap::new();
        let mut adjacency = BTreeMap::new();
        for &v in vs {
            let kw = self.keywords(v)?;
            keywords.insert(v, kw.clone());
            let nbrs = self.adjacency[&v]
                .iter()
                .filter(|(u, _)| vs.contains(u))
                .map(|(&u, &w)| (u, w))
                .collect();
            adjacency.insert(v, nbrs);
        }
        Ok(Graph {
            sigma: self.sigma,
            keywords,
            adjacency,
        })
    }

    /// Whether the subgraph induced by `vs` is connected.
    pub fn is_connected(&self, vs: &BTreeSet<VertexId>) -> Result<bool> {
        let Some(&start) = vs.iter().next() else {
            return Err(Error::EmptyVertexSet);
        };
        if let Some(&missing) = vs.iter().find(|v| !self.contains(**v)) {
            return Err(Error::UnknownVertex(missing));
        }
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in self.adjacency[&v].keys() {
                if vs.contains(&u) && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        Ok(seen.len() == vs.len())
    }

    /// Whether the whole graph is connected. The empty graph is not.
    pub fn is_fully_connected(&self) -> bool {
        let all: BTreeSet<_> = self.vertices().collect();
        self.is_connected(&all).unwrap_or(false)
    }
}

/// Incremental, validating constructor for [`Graph`].
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    sigma: Option<usize>,
    keywords: BTreeMap<VertexId, KeywordSet>,
    adjacency: BTreeMap<VertexId, BTreeMap<VertexId, f64>>,
}

impl GraphBuilder {
    /// Declare the keyword domain size. Without it, the domain is the set of
    /// keywords actually used.
    pub fn sigma(mut self, sigma: usize) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn set_sigma(&mut self, sigma: usize) {
        self.sigma = Some(sigma);
    }

    pub fn add_vertex<I, S>(&mut self, id: VertexId, keywords: I) -> Result<&mut Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if self.keywords.contains_key(&id) {
            return Err(Error::DuplicateVertex(id));
        }
        let mut set = KeywordSet::new();
        for k in keywords {
            let k = k.into();
            if !is_valid_keyword(&k) {
                return Err(Error::InvalidKeyword(k));
            }
            set.insert(k);
        }
        self.keywords.insert(id, set);
        self.adjacency.insert(id, BTreeMap::new());
        Ok(self)
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, w: f64) -> Result<&mut Self> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        for x in [u, v] {
            if !self.keywords.contains_key(&x) {
                return Err(Error::UnknownVertex(x));
            }
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidWeight(u, v, w));
        }
        if let Some(&old) = self.adjacency[&u].get(&v) {
            return Err(if old == w {
                Error::DuplicateEdge(u, v)
            } else {
                Error::AsymmetricEdge(u, v, old, w)
            });
        }
        self.adjacency.get_mut(&u).unwrap().insert(v, w);
        self.adjacency.get_mut(&v).unwrap().insert(u, w);
        Ok(self)
    }

    pub fn build(self) -> Result<Graph> {
        let found = self
            .keywords
            .values()
            .flat_map(|k| k.iter())
            .collect::<BTreeSet<_>>()
            .len();
        let sigma = self.sigma.unwrap_or(found);
        if found > sigma {
            return Err(Error::KeywordDomainExceeded {
                declared: sigma,
                found,
            });
        }
        Ok(Graph {
            sigma,
            keywords: self.keywords,
            adjacency: self.adjacency,
        })
    }
}

/// A connected graph with at least two vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryGraph(Graph);

impl QueryGraph {
    pub fn new(graph: Graph) -> Result<Self> {
        if graph.vertex_count() < 2 {
            return Err(Error::QueryTooSmall(graph.vertex_count()));
        }
        if !graph.is_fully_connected() {
            return Err(Error::QueryNotConnected);
        }
        Ok(QueryGraph(graph))
    }

    pub fn into_inner(self) -> Graph {
        self.0
    }
}

impl Deref for QueryGraph {
    type Target = Graph;

    fn deref(&self) -> &Graph {
        &self.0
    }
}
