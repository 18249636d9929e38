//! Hierarchical tree index over per-vertex auxiliary data.
//!
//! Construction is top-down. A node holding more than `fanout` vertices picks
//! `fanout` well-separated seed vertices, then runs `max_iter` rounds of
//! assigning every member to the child whose center MBR grows least (in
//! log-area), recomputing each center as the union of its members' MBRs.
//! Child capacity is capped at `⌈n / fanout⌉`, which bounds the height by
//! `⌈log_fanout |V(G)|⌉ + 1` regardless of how the MBRs cluster.
//!
//! Every internal entry carries the union of its descendants' MBRs and the
//! element-wise maximum of their sorted weight lists, so pruning an entry
//! never drops a vertex that could survive on its own.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{weight_list, SortedWeightList, VertexAux};
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::graph::{Graph, VertexId};
use crate::mbr::{EmbeddingTable, Mbr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildConfig {
    pub fanout: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            fanout: 16,
            max_iter: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafEntry {
    pub vertex: VertexId,
    pub aux: VertexAux,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChildEntry {
    pub mbr: Mbr,
    pub wlist: SortedWeightList,
    pub child: IndexNode,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndexNode {
    Leaf(Vec<LeafEntry>),
    Internal(Vec<ChildEntry>),
}

impl IndexNode {
    pub fn len(&self) -> usize {
        match self {
            IndexNode::Leaf(e) => e.len(),
            IndexNode::Internal(e) => e.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Levels below and including this node; a leaf has height 1.
    pub fn height(&self) -> usize {
        match self {
            IndexNode::Leaf(_) => 1,
            IndexNode::Internal(children) => {
                1 + children.iter().map(|c| c.child.height()).max().unwrap_or(0)
            }
        }
    }

    /// Union MBR and dominating weight list over the node's entries.
    pub fn aggregate(&self) -> Result<(Mbr, SortedWeightList)> {
        let mut mbr = Mbr::EmptySet;
        let mut wlist = SortedWeightList::default();
        match self {
            IndexNode::Leaf(entries) => {
                for e in entries {
                    mbr.expand(&e.aux.mbr)?;
                    wlist.dominate(&e.aux.wlist);
                }
            }
            IndexNode::Internal(entries) => {
                for e in entries {
                    mbr.expand(&e.mbr)?;
                    wlist.dominate(&e.wlist);
                }
            }
        }
        Ok((mbr, wlist))
    }

    /// Leaf entries in depth-first order.
    pub fn leaf_entries(&self) -> Vec<&LeafEntry> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match node {
                IndexNode::Leaf(entries) => out.extend(entries.iter()),
                IndexNode::Internal(entries) => {
                    stack.extend(entries.iter().rev().map(|e| &e.child))
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeIndex {
    pub root: IndexNode,
    pub fanout: usize,
    pub dim: usize,
    pub embedding_fingerprint: Fingerprint,
    pub graph_fingerprint: Fingerprint,
}

impl TreeIndex {
    /// Computes auxiliary data for `g` under `t` and builds the tree.
    pub fn build(g: &Graph, t: &EmbeddingTable, cfg: &BuildConfig) -> Result<Self> {
        let aux = compute_aux(g, t)?;
        Ok(TreeIndex {
            root: build_tree(&aux, cfg)?,
            fanout: cfg.fanout,
            dim: t.dim(),
            embedding_fingerprint: t.fingerprint(),
            graph_fingerprint: g.fingerprint(),
        })
    }

    pub fn height(&self) -> usize {
        self.root.height()
    }

    pub fn vertex_count(&self) -> usize {
        self.root.leaf_entries().len()
    }

    /// Rejects a graph or embedding table other than the ones indexed.
    pub fn verify(&self, g: &Graph, t: &EmbeddingTable) -> Result<()> {
        self.verify_fingerprints(&g.fingerprint(), &t.fingerprint())
    }

    pub fn verify_fingerprints(&self, graph: &Fingerprint, embeddings: &Fingerprint) -> Result<()> {
        if self.graph_fingerprint != *graph {
            return Err(Error::FingerprintMismatch("graph"));
        }
        if self.embedding_fingerprint != *embeddings {
            return Err(Error::FingerprintMismatch("embedding"));
        }
        Ok(())
    }
}

/// Per vertex: MBR of its keyword embeddings and its sorted incident weights.
pub fn compute_aux(g: &Graph, t: &EmbeddingTable) -> Result<BTreeMap<VertexId, VertexAux>> {
    g.vertices()
        .map(|v| {
            let kws = g.keywords(v)?;
            let aux = VertexAux {
                mbr: Mbr::of_keyword_set(kws.iter().map(|k| k.as_str()), t)?,
                wlist: weight_list(g, v)?,
            };
            Ok((v, aux))
        })
        .collect()
}

/// Builds the tree over `aux`; deterministic in `(aux, cfg)`.
pub fn build_tree(aux: &BTreeMap<VertexId, VertexAux>, cfg: &BuildConfig) -> Result<IndexNode> {
    if cfg.fanout < 2 {
        return Err(Error::InvalidFanout(cfg.fanout));
    }
    if aux.is_empty() {
        return Err(Error::EmptyAux);
    }
    let items: Vec<(VertexId, &VertexAux)> = aux.iter().map(|(&v, a)| (v, a)).collect();
    let mut builder = Builder {
        items,
        cfg: *cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    let all = (0..builder.items.len()).collect();
    builder.node(all)
}

struct Builder<'a> {
    items: Vec<(VertexId, &'a VertexAux)>,
    cfg: BuildConfig,
    rng: ChaCha8Rng,
}

impl Builder<'_> {
    fn mbr(&self, i: usize) -> &Mbr {
        &self.items[i].1.mbr
    }

    /// `members` are ascending item indices, hence ascending vertex ids.
    fn node(&mut self, members: Vec<usize>) -> Result<IndexNode> {
        let fanout = self.cfg.fanout;
        if members.len() <= fanout {
            return Ok(IndexNode::Leaf(
                members
                    .iter()
                    .map(|&i| LeafEntry {
                        vertex: self.items[i].0,
                        aux: self.items[i].1.clone(),
                    })
                    .collect(),
            ));
        }

        let cap = members.len().div_ceil(fanout);
        let mut centers: Vec<Mbr> = self
            .select_seeds(&members)?
            .into_iter()
            .map(|i| self.mbr(i).clone())
            .collect();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut order = members;
        for _ in 0..self.cfg.max_iter.max(1) {
            order.shuffle(&mut self.rng);
            groups = vec![Vec::new(); fanout];
            for &v in &order {
                let mut best: Option<(usize, f64)> = None;
                for (c, center) in centers.iter().enumerate() {
                    if groups[c].len() >= cap {
                        continue;
                    }
                    let growth = center.area_expansion(self.mbr(v))?;
                    if best.is_none_or(|(_, g)| growth < g) {
                        best = Some((c, growth));
                    }
                }
                groups[best.expect("capacities cover all members").0].push(v);
            }
            for (center, group) in centers.iter_mut().zip(&groups) {
                if group.is_empty() {
                    continue;
                }
                let mut union = Mbr::EmptySet;
                for &v in group {
                    union.expand(&self.items[v].1.mbr)?;
                }
                *center = union;
            }
        }

        let mut entries = Vec::new();
        for mut group in groups.into_iter().filter(|g| !g.is_empty()) {
            group.sort_unstable();
            let child = self.node(group)?;
            let (mbr, wlist) = child.aggregate()?;
            entries.push(ChildEntry { mbr, wlist, child });
        }
        Ok(IndexNode::Internal(entries))
    }

    /// First seed: largest MBR log-area. Each next seed: the member with the
    /// largest summed separation from the seeds chosen so far. Ties go to the
    /// lowest vertex id.
    fn select_seeds(&self, members: &[usize]) -> Result<Vec<usize>> {
        let mut first = 0;
        let mut best_area = f64::NEG_INFINITY;
        for (pos, &i) in members.iter().enumerate() {
            if let Mbr::Bounds { .. } = self.mbr(i) {
                let area = self.mbr(i).log_area()?;
                if area > best_area {
                    best_area = area;
                    first = pos;
                }
            }
        }
        let mut chosen = vec![false; members.len()];
        let mut score = vec![0.0f64; members.len()];
        let mut seeds = vec![members[first]];
        chosen[first] = true;
        while seeds.len() < self.cfg.fanout {
            let last = self.mbr(*seeds.last().unwrap());
            let mut next: Option<usize> = None;
            for (pos, &i) in members.iter().enumerate() {
                if chosen[pos] {
                    continue;
                }
                score[pos] += separation(self.mbr(i), last);
                if next.is_none_or(|n| score[pos] > score[n]) {
                    next = Some(pos);
                }
            }
            let pos = next.expect("more members than fanout");
            chosen[pos] = true;
            seeds.push(members[pos]);
        }
        Ok(seeds)
    }
}

/// Summed per-axis gap between two boxes; negative where they overlap.
fn separation(a: &Mbr, b: &Mbr) -> f64 {
    match (a, b) {
        (Mbr::Bounds { lo, hi }, Mbr::Bounds { lo: blo, hi: bhi }) => (0..lo.len())
            .map(|i| lo[i].max(blo[i]) - hi[i].min(bhi[i]))
            .sum(),
        _ => 0.0,
    }
}
