//! Synthetic small-world data graphs and random-walk query workloads.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // Float provides exp() without std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gnd::VertexMapping;
use crate::graph::{Graph, QueryGraph, VertexId};

/// Default thresholds and sizes of the benchmark parameter table.
pub mod defaults {
    pub const DELTA_MAX: f64 = 1.0;
    pub const DELTA_SUM: f64 = 3.0;
    pub const KEYWORDS_PER_VERTEX: usize = 3;
    pub const SIGMA: usize = 50;
    pub const QUERY_SIZE: usize = 5;
    pub const GRAPH_SIZE: usize = 50_000;
    pub const DIM: usize = 64;
    pub const FANOUT: usize = 16;
    pub const QUERIES: usize = 50;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeywordDistribution {
    Uniform,
    /// Discretized over keyword rank, centered, with σ = |Σ| / 6.
    Gaussian,
    /// Rank-frequency with exponent 1.
    Zipf,
}

impl FromStr for KeywordDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "uni" => Ok(KeywordDistribution::Uniform),
            "gaussian" | "gau" => Ok(KeywordDistribution::Gaussian),
            "zipf" => Ok(KeywordDistribution::Zipf),
            _ => Err(Error::InvalidConfig(format!("unknown keyword distribution {s:?}"))),
        }
    }
}

impl fmt::Display for KeywordDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeywordDistribution::Uniform => "uniform",
            KeywordDistribution::Gaussian => "gaussian",
            KeywordDistribution::Zipf => "zipf",
        })
    }
}

impl KeywordDistribution {
    /// Unnormalized probability of each keyword rank.
    pub fn weights(self, sigma: usize) -> Vec<f64> {
        match self {
            KeywordDistribution::Uniform => alloc::vec![1.0; sigma],
            KeywordDistribution::Gaussian => {
                let mean = (sigma as f64 - 1.0) / 2.0;
                let sd = sigma as f64 / 6.0;
                (0..sigma)
                    .map(|r| (-(r as f64 - mean).powi(2) / (2.0 * sd * sd)).exp())
                    .collect()
            }
            KeywordDistribution::Zipf => (0..sigma).map(|r| 1.0 / (r as f64 + 1.0)).collect(),
        }
    }
}

/// Keyword token of rank `r`.
pub fn keyword_name(r: usize) -> String {
    format!("k{r}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    /// Ring lattice degree; each vertex links to `ring_k / 2` neighbors per side.
    pub ring_k: usize,
    pub p_shortcut: f64,
    pub sigma_size: usize,
    pub kw_per_vertex: usize,
    pub kw_dist: KeywordDistribution,
    /// Inclusive integer weight range.
    pub weight_range: (u32, u32),
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: defaults::GRAPH_SIZE,
            ring_k: 4,
            p_shortcut: 0.1,
            sigma_size: defaults::SIGMA,
            kw_per_vertex: defaults::KEYWORDS_PER_VERTEX,
            kw_dist: KeywordDistribution::Uniform,
            weight_range: (1, 5),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n < 3 {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        if self.ring_k < 2 || self.ring_k % 2 != 0 || self.ring_k >= self.n {
            return bad(format!("ring_k must be even, at least 2 and below n, got {}", self.ring_k));
        }
        if !(0.0..=1.0).contains(&self.p_shortcut) {
            return bad(format!("p_shortcut must lie in [0, 1], got {}", self.p_shortcut));
        }
        if self.kw_per_vertex > self.sigma_size {
            return bad(format!(
                "kw_per_vertex {} exceeds sigma_size {}",
                self.kw_per_vertex, self.sigma_size
            ));
        }
        let (lo, hi) = self.weight_range;
        if lo == 0 || lo > hi {
            return bad(format!("weight range [{lo}, {hi}] must be positive and ordered"));
        }
        Ok(())
    }
}

/// Newman-Watts-Strogatz graph: a ring lattice plus random shortcuts (no
/// edges are removed), with keywords and integer weights drawn per `cfg`.
pub fn gen_synthetic(cfg: &SynthConfig) -> Result<Graph> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let weights = cfg.kw_dist.weights(cfg.sigma_size);

    let mut b = Graph::builder().sigma(cfg.sigma_size);
    for v in 0..n {
        let kws = draw_distinct(&mut rng, &weights, cfg.kw_per_vertex);
        b.add_vertex(v as VertexId, kws.into_iter().map(keyword_name))?;
    }

    let mut adjacency: Vec<BTreeSet<usize>> = alloc::vec![BTreeSet::new(); n];
    let mut ring = Vec::with_capacity(n * cfg.ring_k / 2);
    for u in 0..n {
        for j in 1..=cfg.ring_k / 2 {
            let v = (u + j) % n;
            adjacency[u].insert(v);
            adjacency[v].insert(u);
            ring.push((u, v));
        }
    }
    for &(u, _) in &ring {
        if rng.gen::<f64>() >= cfg.p_shortcut || adjacency[u].len() >= n - 1 {
            continue;
        }
        let mut w = rng.gen_range(0..n);
        while w == u || adjacency[u].contains(&w) {
            w = rng.gen_range(0..n);
        }
        adjacency[u].insert(w);
        adjacency[w].insert(u);
    }

    let (lo, hi) = cfg.weight_range;
    for u in 0..n {
        for &v in adjacency[u].range(u + 1..) {
            let w = rng.gen_range(lo..=hi) as f64;
            b.add_edge(u as VertexId, v as VertexId, w)?;
        }
    }
    b.build()
}

/// `count` distinct ranks drawn without replacement, proportional to `weights`.
fn draw_distinct(rng: &mut ChaCha8Rng, weights: &[f64], count: usize) -> Vec<usize> {
    let mut remaining = weights.to_vec();
    let mut picked = Vec::with_capacity(count);
    for _ in 0..count {
        let total: f64 = remaining.iter().sum();
        let mut x = rng.gen::<f64>() * total;
        let mut choice = None;
        for (r, &w) in remaining.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            choice = Some(r);
            if x < w {
                break;
            }
            x -= w;
        }
        let r = choice.expect("fewer keywords than requested");
        remaining[r] = 0.0;
        picked.push(r);
    }
    picked
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryGenConfig {
    pub qsize: usize,
    pub kw_sample_rate: f64,
    pub edge_sample_rate: f64,
    pub seed: u64,
}

impl Default for QueryGenConfig {
    fn default() -> Self {
        QueryGenConfig {
            qsize: defaults::QUERY_SIZE,
            kw_sample_rate: 0.9,
            edge_sample_rate: 0.7,
            seed: 0,
        }
    }
}

impl QueryGenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.qsize < 2 {
            return Err(Error::InvalidConfig(format!("qsize must be at least 2, got {}", self.qsize)));
        }
        for (name, rate) in [("kw_sample_rate", self.kw_sample_rate), ("edge_sample_rate", self.edge_sample_rate)] {
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(Error::InvalidConfig(format!("{name} must lie in (0, 1], got {rate}")));
            }
        }
        Ok(())
    }
}

const WALK_RESTARTS: usize = 100;
const WALK_STEPS_PER_VERTEX: usize = 50;

/// Random-walk queries; see [`gen_queries_with_sources`].
pub fn gen_queries(g: &Graph, cfg: &QueryGenConfig, count: usize) -> Result<Vec<QueryGraph>> {
    Ok(gen_queries_with_sources(g, cfg, count)?
        .into_iter()
        .map(|(q, _)| q)
        .collect())
}

/// Each query comes from a random walk that collects `qsize` distinct data
/// vertices. The walk's first-visit edges form a spanning tree that is always
/// kept; other induced edges survive with `edge_sample_rate`, and each keyword
/// with `kw_sample_rate`. Query vertices are numbered `1..=qsize` in visit
/// order; the returned mapping sends them back to their source vertices.
pub fn gen_queries_with_sources(
    g: &Graph,
    cfg: &QueryGenConfig,
    count: usize,
) -> Result<Vec<(QueryGraph, VertexMapping)>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vertices: Vec<VertexId> = g.vertices().collect();
    if vertices.len() < cfg.qsize {
        return Err(Error::WalkFailed(cfg.qsize));
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (visited, tree) = random_walk(g, &vertices, cfg.qsize, &mut rng)?;
        out.push(assemble_query(g, &visited, &tree, cfg, &mut rng)?);
    }
    Ok(out)
}

type TreeEdges = BTreeSet<(VertexId, VertexId)>;

fn random_walk(
    g: &Graph,
    vertices: &[VertexId],
    qsize: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<VertexId>, TreeEdges)> {
    for _ in 0..WALK_RESTARTS {
        let mut current = vertices[rng.gen_range(0..vertices.len())];
        let mut visited = alloc::vec![current];
        let mut tree = BTreeSet::new();
        for _ in 0..WALK_STEPS_PER_VERTEX * qsize {
            if visited.len() == qsize {
                break;
            }
            let nbrs = g.neighbors(current)?;
            if nbrs.is_empty() {
                break;
            }
            let next = *nbrs.keys().nth(rng.gen_range(0..nbrs.len())).unwrap();
            if !visited.contains(&next) {
                visited.push(next);
                tree.insert((current.min(next), current.max(next)));
            }
            current = next;
        }
        if visited.len() == qsize {
            return Ok((visited, tree));
        }
    }
    Err(Error::WalkFailed(qsize))
}

fn assemble_query(
    g: &Graph,
    visited: &[VertexId],
    tree: &TreeEdges,
    cfg: &QueryGenConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(QueryGraph, VertexMapping)> {
    let id_of = |v: VertexId| visited.iter().position(|&x| x == v).unwrap() as VertexId + 1;
    let mut b = Graph::builder().sigma(g.sigma());
    for &v in visited {
        let kept: Vec<&String> = g
            .keywords(v)?
            .iter()
            .filter(|_| rng.gen::<f64>() < cfg.kw_sample_rate)
            .collect();
        b.add_vertex(id_of(v), kept.into_iter().cloned())?;
    }
    let members: BTreeSet<VertexId> = visited.iter().copied().collect();
    let induced = g.induced_subgraph(&members)?;
    for (u, v, w) in induced.edges() {
        let keep = tree.contains(&(u, v)) || rng.gen::<f64>() < cfg.edge_sample_rate;
        if keep {
            b.add_edge(id_of(u), id_of(v), w)?;
        }
    }
    let q = QueryGraph::new(b.build()?)?;
    let source = visited.iter().map(|&v| (id_of(v), v)).collect();
    Ok((q, source))
}
