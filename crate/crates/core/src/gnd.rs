//! Neighbor difference (ND), generalized neighbor difference (GND), the
//! answer predicate, and an exhaustive reference enumerator.
//!
//! For a mapping `M` from query vertices to data vertices, the ND of the pair
//! `(q_j, M(q_j))` charges every query edge `q_j - n_j` by how much the mapped
//! data edge `M(q_j) - M(n_j)` falls short of its weight. A data edge that does
//! not exist has weight 0, so it is charged in full. GND aggregates the
//! per-vertex NDs with MAX or SUM.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, QueryGraph, VertexId};

/// The aggregate applied over per-vertex neighbor differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregate {
    Max,
    Sum,
}

impl Aggregate {
    /// `f` over the values; 0 for an empty input.
    pub fn apply<I: IntoIterator<Item = f64>>(self, values: I) -> f64 {
        let values = values.into_iter();
        match self {
            Aggregate::Max => values.fold(0.0, f64::max),
            Aggregate::Sum => values.sum(),
        }
    }
}

impl FromStr for Aggregate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Aggregate::Max),
            "sum" => Ok(Aggregate::Sum),
            _ => Err(Error::InvalidConfig(alloc::format!("unknown aggregate {s:?}"))),
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregate::Max => "max",
            Aggregate::Sum => "sum",
        })
    }
}

/// Threshold `delta` and aggregate `f` of a query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryParams {
    pub delta: f64,
    pub aggregate: Aggregate,
}

impl QueryParams {
    pub fn new(delta: f64, aggregate: Aggregate) -> Result<Self> {
        if delta.is_nan() || delta < 0.0 {
            return Err(Error::InvalidConfig(alloc::format!(
                "delta must be non-negative, got {delta}"
            )));
        }
        Ok(QueryParams { delta, aggregate })
    }
}

/// Query vertex id to data vertex id.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexMapping(BTreeMap<VertexId, VertexId>);

impl VertexMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query: VertexId, data: VertexId) -> Option<VertexId> {
        self.0.insert(query, data)
    }

    pub fn get(&self, query: VertexId) -> Option<VertexId> {
        self.0.get(&query).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pairs sorted by query vertex id.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.0.iter().map(|(&q, &v)| (q, v))
    }

    pub fn data_vertices(&self) -> BTreeSet<VertexId> {
        self.0.values().copied().collect()
    }

    /// Checks that the mapping is total over `V(q)`, injective, and lands in `V(G)`.
    pub fn validate(&self, q: &Graph, g: &Graph) -> Result<()> {
        for qv in q.vertices() {
            if !self.0.contains_key(&qv) {
                return Err(Error::MappingNotTotal(qv));
            }
        }
        if let Some(&extra) = self.0.keys().find(|k| !q.contains(**k)) {
            return Err(Error::UnknownVertex(extra));
        }
        let mut seen = BTreeSet::new();
        for &v in self.0.values() {
            if !g.contains(v) {
                return Err(Error::UnknownVertex(v));
            }
            if !seen.insert(v) {
                return Err(Error::MappingNotInjective(v));
            }
        }
        Ok(())
    }
}

impl FromIterator<(VertexId, VertexId)> for VertexMapping {
    fn from_iter<T: IntoIterator<Item = (VertexId, VertexId)>>(iter: T) -> Self {
        VertexMapping(iter.into_iter().collect())
    }
}

/// A matched subgraph: the mapping, its GND, and the data vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub mapping: VertexMapping,
    pub gnd: f64,
    pub vertex_set: BTreeSet<VertexId>,
}

impl Answer {
    fn new(mapping: VertexMapping, gnd: f64) -> Self {
        let vertex_set = mapping.data_vertices();
        Answer {
            mapping,
            gnd,
            vertex_set,
        }
    }

    /// Canonical ordering: sorted vertex set, then mapping.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        self.vertex_set
            .cmp(&other.vertex_set)
            .then_with(|| self.mapping.cmp(&other.mapping))
    }

    /// Output-file ordering: GND, then vertex set, then mapping.
    pub fn cmp_by_score(&self, other: &Self) -> Ordering {
        self.gnd
            .total_cmp(&other.gnd)
            .then_with(|| self.cmp_canonical(other))
    }
}

pub(crate) fn build_answer(
    q: &QueryGraph,
    g: &Graph,
    mapping: VertexMapping,
    aggregate: Aggregate,
) -> Result<Answer> {
    let gnd = gnd_score(q, g, &mapping, aggregate)?;
    Ok(Answer::new(mapping, gnd))
}

fn nd_unchecked(q: &Graph, qj: VertexId, g: &Graph, vi: VertexId, m: &VertexMapping) -> Result<f64> {
    let mut nd = 0.0;
    for (&nj, &wq) in q.neighbors(qj)? {
        let mapped = m.get(nj).ok_or(Error::MappingNotTotal(nj))?;
        let wd = g.weight(vi, mapped).unwrap_or(0.0);
        nd += (wq - wd).max(0.0);
    }
    Ok(nd)
}

/// ND of the pair `(qj, vi)` under mapping `m`, where `m(qj)` must be `vi`.
pub fn nd_score(
    q: &QueryGraph,
    qj: VertexId,
    g: &Graph,
    vi: VertexId,
    m: &VertexMapping,
) -> Result<f64> {
    m.validate(q, g)?;
    let mapped = m.get(qj).ok_or(Error::MappingNotTotal(qj))?;
    if mapped != vi {
        return Err(Error::MappingMismatch {
            query: qj,
            mapped,
            given: vi,
        });
    }
    nd_unchecked(q, qj, g, vi, m)
}

/// Per query vertex ND values in query-vertex order.
pub fn nd_profile(q: &QueryGraph, g: &Graph, m: &VertexMapping) -> Result<Vec<f64>> {
    m.validate(q, g)?;
    q.vertices()
        .map(|qj| nd_unchecked(q, qj, g, m.get(qj).unwrap(), m))
        .collect()
}

pub fn gnd_score(q: &QueryGraph, g: &Graph, m: &VertexMapping, f: Aggregate) -> Result<f64> {
    Ok(f.apply(nd_profile(q, g, m)?))
}

/// Keyword containment on every pair, GND within `delta` (inclusive), and a
/// connected induced subgraph on the mapped vertices.
pub fn is_answer(q: &QueryGraph, g: &Graph, m: &VertexMapping, p: &QueryParams) -> Result<bool> {
    m.validate(q, g)?;
    for (qj, vi) in m.iter() {
        if !q.keywords(qj)?.is_subset(g.keywords(vi)?) {
            return Ok(false);
        }
    }
    if gnd_score(q, g, m, p.aggregate)? > p.delta {
        return Ok(false);
    }
    g.is_connected(&m.data_vertices())
}

pub const DEFAULT_ORACLE_CAP: usize = 500;

/// Every answer, by enumerating all connected `|V(q)|`-subsets of `G` and
/// every bijection onto each. Refuses graphs above [`DEFAULT_ORACLE_CAP`].
pub fn brute_force_s3gnd(g: &Graph, q: &QueryGraph, p: &QueryParams) -> Result<Vec<Answer>> {
    brute_force_s3gnd_with_cap(g, q, p, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_s3gnd_with_cap(
    g: &Graph,
    q: &QueryGraph,
    p: &QueryParams,
    cap: usize,
) -> Result<Vec<Answer>> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::OracleCapExceeded { vertices: n, cap });
    }
    let ids: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|v| g.neighbors(*v).unwrap().keys().map(|u| index[u]).collect())
        .collect();
    let qids: Vec<VertexId> = q.vertices().collect();
    if qids.len() > 128 {
        return Err(Error::InvalidConfig("oracle supports at most 128 query vertices".into()));
    }
    // hosts[i] has bit j set when data vertex i contains q_j's keywords.
    let hosts: Vec<u128> = ids
        .iter()
        .map(|&v| {
            let kw = g.keywords(v).unwrap();
            qids.iter()
                .enumerate()
                .filter(|(_, qj)| q.keywords(**qj).unwrap().is_subset(kw))
                .fold(0u128, |acc, (j, _)| acc | (1 << j))
        })
        .collect();

    let mut answers = Vec::new();
    let mut failure = None;
    for_each_connected_subset(&adj, qids.len(), |subset| {
        if failure.is_some() {
            return;
        }
        let mut slots = vec![usize::MAX; qids.len()];
        let mut used = vec![false; subset.len()];
        permute(0, subset, &hosts, &mut slots, &mut used, &mut |slots| {
            let m: VertexMapping = qids
                .iter()
                .zip(slots)
                .map(|(&qj, &i)| (qj, ids[i]))
                .collect();
            match is_answer(q, g, &m, p).and_then(|ok| {
                ok.then(|| build_answer(q, g, m, p.aggregate)).transpose()
            }) {
                Ok(Some(a)) => answers.push(a),
                Ok(None) => {}
                Err(e) => failure = Some(e),
            }
        });
    });
    if let Some(e) = failure {
        return Err(e);
    }
    answers.sort_by(Answer::cmp_canonical);
    Ok(answers)
}

fn permute(
    j: usize,
    subset: &[usize],
    hosts: &[u128],
    slots: &mut [usize],
    used: &mut [bool],
    emit: &mut dyn FnMut(&[usize]),
) {
    if j == slots.len() {
        emit(slots);
        return;
    }
    for (pos, &v) in subset.iter().enumerate() {
        if used[pos] || hosts[v] & (1 << j) == 0 {
            continue;
        }
        used[pos] = true;
        slots[j] = v;
        permute(j + 1, subset, hosts, slots, used, emit);
        used[pos] = false;
    }
}

/// Calls `visit` once per connected vertex subset of size `k` (ESU enumeration).
/// `adj` must hold sorted neighbor lists.
pub fn for_each_connected_subset(adj: &[Vec<usize>], k: usize, mut visit: impl FnMut(&[usize])) {
    if k == 0 {
        return;
    }
    let mut sub = Vec::with_capacity(k);
    for v in 0..adj.len() {
        let ext: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
        sub.push(v);
        extend_subset(adj, k, v, &mut sub, ext, &mut visit);
        sub.pop();
    }
}

fn extend_subset(
    adj: &[Vec<usize>],
    k: usize,
    root: usize,
    sub: &mut Vec<usize>,
    mut ext: Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if sub.len() == k {
        visit(sub);
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        for &u in &adj[w] {
            let exclusive = u > root
                && !sub.contains(&u)
                && !sub.iter().any(|&s| adj[s].binary_search(&u).is_ok());
            if exclusive && !next.contains(&u) {
                next.push(u);
            }
        }
        sub.push(w);
        extend_subset(adj, k, root, sub, next, visit);
        sub.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::graph;

    fn q(vertices: &[(VertexId, &[&str])], edges: &[(VertexId, VertexId, f64)]) -> QueryGraph {
        QueryGraph::new(graph(vertices, edges)).unwrap()
    }

    fn mapping(pairs: &[(VertexId, VertexId)]) -> VertexMapping {
        pairs.iter().copied().collect()
    }

    // q: 1 -(5)- 2 -(3)- 3, star centered on 2 in the data graph variants below.
    fn star_query() -> QueryGraph {
        q(&[(1, &[]), (2, &[]), (3, &[])], &[(2, 1, 5.0), (2, 3, 3.0)])
    }

    #[test]
    fn nd_identical_weights_is_zero() {
        let g = graph(&[(10, &[]), (20, &[]), (30, &[])], &[(20, 10, 5.0), (20, 30, 3.0)]);
        let m = mapping(&[(1, 10), (2, 20), (3, 30)]);
        assert_eq!(nd_score(&star_query(), 2, &g, 20, &m).unwrap(), 0.0);
    }

    #[test]
    fn nd_charges_shortfall() {
        // query edge weight 5 mapped onto a data edge of weight 3
        let qg = q(&[(1, &[]), (2, &[])], &[(1, 2, 5.0)]);
        let g = graph(&[(10, &[]), (20, &[])], &[(10, 20, 3.0)]);
        let m = mapping(&[(1, 10), (2, 20)]);
        assert_eq!(nd_score(&qg, 1, &g, 10, &m).unwrap(), 2.0);
    }

    #[test]
    fn nd_charges_missing_edge_in_full() {
        let g = graph(&[(10, &[]), (20, &[]), (30, &[])], &[(20, 10, 3.0)]);
        let m = mapping(&[(1, 10), (2, 20), (3, 30)]);
        assert_eq!(nd_score(&star_query(), 2, &g, 20, &m).unwrap(), 5.0);
    }

    #[test]
    fn nd_errors() {
        let g = graph(&[(10, &[]), (20, &[]), (30, &[])], &[]);
        let partial = mapping(&[(1, 10), (2, 20)]);
        assert_eq!(
            nd_score(&star_query(), 2, &g, 20, &partial).unwrap_err(),
            Error::MappingNotTotal(3)
        );
        let m = mapping(&[(1, 10), (2, 20), (3, 30)]);
        assert!(matches!(
            nd_score(&star_query(), 2, &g, 10, &m),
            Err(Error::MappingMismatch { .. })
        ));
        let dup = mapping(&[(1, 10), (2, 20), (3, 20)]);
        assert_eq!(
            nd_score(&star_query(), 2, &g, 20, &dup).unwrap_err(),
            Error::MappingNotInjective(20)
        );
    }

    #[test]
    fn aggregates() {
        assert_eq!(Aggregate::Sum.apply([2.0, 0.0, 0.0]), 2.0);
        assert_eq!(Aggregate::Max.apply([2.0, 0.0, 0.0]), 2.0);
        assert_eq!(Aggregate::Sum.apply([1.0, 3.0]), 4.0);
        assert_eq!(Aggregate::Max.apply([1.0, 3.0]), 3.0);
        assert_eq!("SUM".parse::<Aggregate>().unwrap(), Aggregate::Sum);
        assert!("avg".parse::<Aggregate>().is_err());
    }

    #[test]
    fn gnd_identity_is_zero() {
        let qg = star_query();
        let m = mapping(&[(1, 1), (2, 2), (3, 3)]);
        for f in [Aggregate::Max, Aggregate::Sum] {
            assert_eq!(gnd_score(&qg, &qg, &m, f).unwrap(), 0.0);
        }
    }

    #[test]
    fn answer_predicate() {
        let qg = q(&[(1, &["a"]), (2, &["b"])], &[(1, 2, 3.0)]);
        let id = mapping(&[(1, 1), (2, 2)]);
        let p0 = QueryParams::new(0.0, Aggregate::Max).unwrap();
        assert!(is_answer(&qg, &qg, &id, &p0).unwrap());

        let g = graph(&[(1, &["a"]), (2, &["c"])], &[(1, 2, 3.0)]);
        let big = QueryParams::new(1e9, Aggregate::Sum).unwrap();
        assert!(!is_answer(&qg, &g, &id, &big).unwrap());

        // GND = 2 under MAX (both endpoints charged 2), delta = 1
        let g = graph(&[(1, &["a"]), (2, &["b"])], &[(1, 2, 1.0)]);
        assert_eq!(gnd_score(&qg, &g, &id, Aggregate::Max).unwrap(), 2.0);
        let p1 = QueryParams::new(1.0, Aggregate::Max).unwrap();
        assert!(!is_answer(&qg, &g, &id, &p1).unwrap());
        let p2 = QueryParams::new(2.0, Aggregate::Max).unwrap();
        assert!(is_answer(&qg, &g, &id, &p2).unwrap());
    }

    #[test]
    fn disconnected_image_is_rejected() {
        let qg = q(&[(1, &[]), (2, &[])], &[(1, 2, 1.0)]);
        let g = graph(&[(1, &[]), (2, &[])], &[]);
        let p = QueryParams::new(10.0, Aggregate::Sum).unwrap();
        assert!(!is_answer(&qg, &g, &mapping(&[(1, 1), (2, 2)]), &p).unwrap());
    }

    #[test]
    fn oracle_basics() {
        let qg = star_query();
        let p = QueryParams::new(0.0, Aggregate::Sum).unwrap();
        let answers = brute_force_s3gnd(&qg, &qg, &p).unwrap();
        assert!(answers.iter().any(|a| a.mapping == mapping(&[(1, 1), (2, 2), (3, 3)])));

        let needy = q(&[(1, &["x"]), (2, &[])], &[(1, 2, 1.0)]);
        let g = graph(&[(1, &["a"]), (2, &["b"])], &[(1, 2, 1.0)]);
        assert!(brute_force_s3gnd(&g, &needy, &p).unwrap().is_empty());

        assert_eq!(
            brute_force_s3gnd_with_cap(&g, &needy, &p, 1).unwrap_err(),
            Error::OracleCapExceeded { vertices: 2, cap: 1 }
        );
    }

    #[test]
    fn esu_counts_connected_triples_of_a_path() {
        // path 0-1-2-3 has two connected 3-subsets
        let adj = vec![vec![1], vec![0, 2], vec![1, 3], vec![2]];
        let mut seen = Vec::new();
        for_each_connected_subset(&adj, 3, |s| {
            let mut s = s.to_vec();
            s.sort();
            seen.push(s);
        });
        seen.sort();
        assert_eq!(seen, vec![vec![0, 1, 2], vec![1, 2, 3]]);
    }
}
