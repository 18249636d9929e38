//! Online query answering: breadth-first index traversal that collects
//! per-query-vertex candidates, then depth-first assembly of candidates into
//! complete mappings.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use crate::bounds::{lb_nd, weight_list, SortedWeightList};
use crate::error::{Error, Result};
use crate::gnd::{build_answer, Aggregate, Answer, QueryParams, VertexMapping};
use crate::graph::{Graph, QueryGraph, VertexId};
use crate::index::{IndexNode, TreeIndex};
use crate::mbr::{EmbeddingTable, Mbr};

/// Which pruning rules are active. Disabling rules never changes the answer
/// set, only the work done to reach it (except `adjacent_extension`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneConfig {
    /// Keyword-embedding MBR containment, per vertex and per index entry.
    pub keyword_mbr: bool,
    /// ND lower bound from sorted weight lists, per vertex and per index entry.
    pub nd_bound: bool,
    /// GND lower bound over mapped pairs during refinement.
    pub gnd_bound: bool,
    /// Only extend a partial mapping with data vertices adjacent to an already
    /// mapped one. Off by default: it drops answers whose missing query edges
    /// are absorbed by `delta`.
    pub adjacent_extension: bool,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            keyword_mbr: true,
            nd_bound: true,
            gnd_bound: true,
            adjacent_extension: false,
        }
    }
}

impl PruneConfig {
    pub fn none() -> Self {
        PruneConfig {
            keyword_mbr: false,
            nd_bound: false,
            gnd_bound: false,
            adjacent_extension: false,
        }
    }

    /// Turns off a rule by name: `mbr`, `nd` or `gnd`.
    pub fn disable(&mut self, rule: &str) -> Result<()> {
        match rule.trim() {
            "mbr" => self.keyword_mbr = false,
            "nd" => self.nd_bound = false,
            "gnd" => self.gnd_bound = false,
            other => {
                return Err(Error::InvalidConfig(alloc::format!(
                    "unknown pruning rule {other:?}"
                )))
            }
        }
        Ok(())
    }
}

/// Candidate data vertices per query vertex, each list sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSets {
    query_vertices: Vec<VertexId>,
    sets: Vec<Vec<VertexId>>,
}

impl CandidateSets {
    /// Every data vertex for every query vertex.
    pub fn full(g: &Graph, q: &QueryGraph) -> Self {
        let all: Vec<VertexId> = g.vertices().collect();
        CandidateSets {
            query_vertices: q.vertices().collect(),
            sets: vec![all; q.vertex_count()],
        }
    }

    pub fn from_sets(sets: BTreeMap<VertexId, Vec<VertexId>>) -> Self {
        let (query_vertices, mut sets): (Vec<_>, Vec<_>) = sets.into_iter().unzip();
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
        }
        CandidateSets { query_vertices, sets }
    }

    pub fn get(&self, qj: VertexId) -> Option<&[VertexId]> {
        let pos = self.query_vertices.binary_search(&qj).ok()?;
        Some(&self.sets[pos])
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &[VertexId])> {
        self.query_vertices
            .iter()
            .copied()
            .zip(self.sets.iter().map(Vec::as_slice))
    }

    pub fn total(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryStats {
    pub candidates_total: usize,
    /// `1 - candidates_total / (|V(q)| · |V(G)|)`.
    pub pruning_power: f64,
    pub answers: usize,
    /// Index entries whose whole subtree was skipped.
    pub nodes_pruned: u64,
    /// Complete mappings that reached the exact GND check.
    pub refined_mappings: u64,
    /// Partial or complete mappings cut by the GND lower bound.
    pub gnd_pruned: u64,
    /// Filled in by callers that can read a clock.
    pub wall_time: Option<Duration>,
}

impl QueryStats {
    pub fn pruning_power(candidates_total: usize, query_size: usize, graph_size: usize) -> f64 {
        let pairs = query_size * graph_size;
        if pairs == 0 {
            return 0.0;
        }
        1.0 - candidates_total as f64 / pairs as f64
    }
}

struct PreparedQuery {
    ids: Vec<VertexId>,
    /// `None` when a keyword is unknown to the table: no data vertex can host it.
    mbrs: Vec<Option<Mbr>>,
    lists: Vec<SortedWeightList>,
}

impl PreparedQuery {
    fn new(q: &QueryGraph, t: &EmbeddingTable) -> Result<Self> {
        let ids: Vec<VertexId> = q.vertices().collect();
        let mut mbrs = Vec::with_capacity(ids.len());
        let mut lists = Vec::with_capacity(ids.len());
        for &qj in &ids {
            let kws = q.keywords(qj)?;
            let mbr = match Mbr::of_keyword_set(kws.iter().map(|k| k.as_str()), t) {
                Ok(m) => Some(m),
                Err(Error::UnknownKeyword(_)) => None,
                Err(e) => return Err(e),
            };
            mbrs.push(mbr);
            lists.push(weight_list(q, qj)?);
        }
        Ok(PreparedQuery { ids, mbrs, lists })
    }

    fn survives(&self, j: usize, mbr: &Mbr, wlist: &SortedWeightList, p: &QueryParams, prune: &PruneConfig) -> Result<bool> {
        if prune.keyword_mbr {
            match &self.mbrs[j] {
                Some(qm) if mbr.contains(qm)? => {}
                _ => return Ok(false),
            }
        }
        Ok(!prune.nd_bound || lb_nd(&self.lists[j], wlist) <= p.delta)
    }
}

/// A data graph with its index and the embedding table the index was built with.
#[derive(Debug, Clone, Copy)]
pub struct QueryEngine<'a> {
    graph: &'a Graph,
    index: &'a TreeIndex,
    table: &'a EmbeddingTable,
}

impl<'a> QueryEngine<'a> {
    /// Fails when `index` was built from a different graph or table.
    pub fn new(graph: &'a Graph, index: &'a TreeIndex, table: &'a EmbeddingTable) -> Result<Self> {
        index.verify(graph, table)?;
        Ok(QueryEngine { graph, index, table })
    }

    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    /// Candidate retrieval over the index, also returning the number of
    /// index entries pruned.
    pub fn retrieve_candidates(
        &self,
        q: &QueryGraph,
        p: &QueryParams,
        prune: &PruneConfig,
    ) -> Result<(CandidateSets, u64)> {
        let prepared = PreparedQuery::new(q, self.table)?;
        let mut sets = vec![Vec::new(); prepared.ids.len()];
        let mut nodes_pruned = 0;
        let mut queue = VecDeque::from([(&self.index.root, (0..prepared.ids.len()).collect::<Vec<_>>())]);
        while let Some((node, relevant)) = queue.pop_front() {
            match node {
                IndexNode::Leaf(entries) => {
                    for e in entries {
                        for &j in &relevant {
                            if prepared.survives(j, &e.aux.mbr, &e.aux.wlist, p, prune)? {
                                sets[j].push(e.vertex);
                            }
                        }
                    }
                }
                IndexNode::Internal(entries) => {
                    for e in entries {
                        let mut child_relevant = Vec::with_capacity(relevant.len());
                        for &j in &relevant {
                            if prepared.survives(j, &e.mbr, &e.wlist, p, prune)? {
                                child_relevant.push(j);
                            }
                        }
                        if child_relevant.is_empty() {
                            nodes_pruned += 1;
                        } else {
                            queue.push_back((&e.child, child_relevant));
                        }
                    }
                }
            }
        }
        for s in &mut sets {
            s.sort_unstable();
        }
        Ok((
            CandidateSets {
                query_vertices: prepared.ids,
                sets,
            },
            nodes_pruned,
        ))
    }

    /// Candidate retrieval followed by refinement. Answers are in canonical
    /// order (vertex set, then mapping).
    pub fn query(&self, q: &QueryGraph, p: &QueryParams, prune: &PruneConfig) -> Result<(Vec<Answer>, QueryStats)> {
        let (cands, nodes_pruned) = self.retrieve_candidates(q, p, prune)?;
        let (answers, mut stats) = refine(self.graph, q, &cands, p, prune)?;
        stats.nodes_pruned = nodes_pruned;
        Ok((answers, stats))
    }
}

struct State {
    /// Data vertex per position of the search order.
    assigned: Vec<VertexId>,
    /// Index into the candidate list per position, for lower-bound lookups.
    slots: Vec<usize>,
    /// Exact ND accumulated from edges between already-mapped query vertices.
    partial_nd: Vec<f64>,
}

/// Assembles candidates into complete mappings and keeps those that satisfy
/// keyword containment, GND ≤ δ and induced connectivity.
pub fn refine(
    g: &Graph,
    q: &QueryGraph,
    cands: &CandidateSets,
    p: &QueryParams,
    prune: &PruneConfig,
) -> Result<(Vec<Answer>, QueryStats)> {
    let qids: Vec<VertexId> = q.vertices().collect();
    let k = qids.len();
    let qpos: BTreeMap<VertexId, usize> = qids.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Exact keyword containment, then per-candidate ND lower bounds.
    let mut pools: Vec<Vec<VertexId>> = Vec::with_capacity(k);
    let mut lbs: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &qj in &qids {
        let required = q.keywords(qj)?;
        let qlist = weight_list(q, qj)?;
        let mut pool = Vec::new();
        let mut lb = Vec::new();
        for &v in cands.get(qj).unwrap_or(&[]) {
            if required.is_subset(g.keywords(v)?) {
                pool.push(v);
                lb.push(lb_nd(&qlist, &weight_list(g, v)?));
            }
        }
        pools.push(pool);
        lbs.push(lb);
    }

    let order = search_order(q, &qids, &cands.sets_by_position(&qids));
    let position_of: Vec<usize> = {
        let mut inv = vec![0; k];
        for (t, &j) in order.iter().enumerate() {
            inv[j] = t;
        }
        inv
    };
    // For each position t > 0: (earlier position, query edge weight).
    let back_edges: Vec<Vec<(usize, f64)>> = order
        .iter()
        .enumerate()
        .map(|(t, &j)| {
            q.neighbors(qids[j])
                .unwrap()
                .iter()
                .map(|(n, &w)| (position_of[qpos[n]], w))
                .filter(|&(s, _)| s < t)
                .collect()
        })
        .collect();

    let f = p.aggregate;
    let mut stats = QueryStats {
        candidates_total: cands.total(),
        pruning_power: QueryStats::pruning_power(cands.total(), k, g.vertex_count()),
        ..Default::default()
    };
    let mut answers = Vec::new();

    let start = order[0];
    let mut stack: Vec<State> = Vec::new();
    for (slot, &v) in pools[start].iter().enumerate() {
        if prune.gnd_bound && f.apply([lbs[start][slot]]) > p.delta {
            stats.gnd_pruned += 1;
            continue;
        }
        stack.push(State {
            assigned: vec![v],
            slots: vec![slot],
            partial_nd: vec![0.0],
        });
    }

    while let Some(state) = stack.pop() {
        let depth = state.assigned.len();
        if depth == k {
            if prune.gnd_bound {
                let per_pair: Vec<f64> = (0..k).map(|t| lbs[order[t]][state.slots[t]]).collect();
                if crate::bounds::graph_prunable(&per_pair, f, p.delta)? {
                    stats.gnd_pruned += 1;
                    continue;
                }
            }
            stats.refined_mappings += 1;
            let mapping: VertexMapping = (0..k).map(|t| (qids[order[t]], state.assigned[t])).collect();
            let answer = build_answer(q, g, mapping, f)?;
            if answer.gnd <= p.delta && g.is_connected(&answer.vertex_set)? {
                answers.push(answer);
            }
            continue;
        }

        let j = order[depth];
        let edges = &back_edges[depth];
        let pool = &pools[j];
        let current = f.apply(state.partial_nd.iter().copied());

        // A back-edge whose absence alone exceeds delta forces adjacency to
        // its mapped endpoint; scan that endpoint's neighbors instead of the pool.
        let anchor = edges
            .iter()
            .filter(|&&(s, w)| match f {
                Aggregate::Max => current.max(state.partial_nd[s] + w) > p.delta,
                Aggregate::Sum => current + 2.0 * w > p.delta,
            })
            .map(|&(s, _)| state.assigned[s])
            .min_by_key(|&u| g.degree(u).unwrap_or(usize::MAX));

        let mut extend = |slot: usize| -> Result<()> {
            let v = pool[slot];
            if state.assigned.contains(&v) {
                return Ok(());
            }
            if prune.adjacent_extension
                && !edges.is_empty()
                && !state.assigned.iter().any(|&u| g.weight(u, v).is_some())
            {
                return Ok(());
            }
            let mut nd = state.partial_nd.clone();
            nd.push(0.0);
            for &(s, wq) in edges {
                let wd = g.weight(v, state.assigned[s]).unwrap_or(0.0);
                let charge = (wq - wd).max(0.0);
                nd[s] += charge;
                nd[depth] += charge;
            }
            if f.apply(nd.iter().copied()) > p.delta {
                return Ok(());
            }
            let mut slots = state.slots.clone();
            slots.push(slot);
            if prune.gnd_bound {
                let bound = f.apply((0..=depth).map(|t| lbs[order[t]][slots[t]].max(nd[t])));
                if bound > p.delta {
                    stats.gnd_pruned += 1;
                    return Ok(());
                }
            }
            let mut assigned = state.assigned.clone();
            assigned.push(v);
            stack.push(State {
                assigned,
                slots,
                partial_nd: nd,
            });
            Ok(())
        };

        match anchor {
            Some(u) => {
                for &v in g.neighbors(u)?.keys() {
                    if let Ok(slot) = pool.binary_search(&v) {
                        extend(slot)?;
                    }
                }
            }
            None => {
                for slot in 0..pool.len() {
                    extend(slot)?;
                }
            }
        }
    }

    answers.sort_by(Answer::cmp_canonical);
    answers.dedup_by(|a, b| a.mapping == b.mapping);
    stats.answers = answers.len();
    Ok((answers, stats))
}

impl CandidateSets {
    fn sets_by_position(&self, qids: &[VertexId]) -> Vec<usize> {
        qids.iter().map(|&qj| self.get(qj).map_or(0, <[_]>::len)).collect()
    }
}

/// Start at the query vertex with the fewest candidates; then repeatedly take
/// the unmatched vertex with the largest total edge weight to matched ones.
/// Ties go to the lowest query vertex id.
fn search_order(q: &QueryGraph, qids: &[VertexId], sizes: &[usize]) -> Vec<usize> {
    let k = qids.len();
    let start = (0..k).min_by_key(|&j| (sizes[j], j)).unwrap();
    let mut order = vec![start];
    let mut matched = vec![false; k];
    matched[start] = true;
    while order.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..k).filter(|&j| !matched[j]) {
            let weight: f64 = q
                .neighbors(qids[j])
                .unwrap()
                .iter()
                .filter(|(n, _)| matched[qids.binary_search(n).unwrap()])
                .map(|(_, &w)| w)
                .sum();
            if best.is_none_or(|(_, bw)| weight > bw) {
                best = Some((j, weight));
            }
        }
        let (j, _) = best.unwrap();
        matched[j] = true;
        order.push(j);
    }
    order
}

/// Keeps one answer per vertex set: the lowest GND, ties broken by the
/// lexicographically smallest mapping.
pub fn dedupe_by_vertex_set(mut answers: Vec<Answer>) -> Vec<Answer> {
    answers.sort_by(|a, b| {
        a.vertex_set
            .cmp(&b.vertex_set)
            .then(a.gnd.total_cmp(&b.gnd))
            .then_with(|| a.mapping.cmp(&b.mapping))
    });
    answers.dedup_by(|later, first| later.vertex_set == first.vertex_set);
    answers
}
