use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use s3gnd_core::bounds::{lb_nd, node_prunable_nd, weight_list};
use s3gnd_core::gnd::{brute_force_s3gnd, gnd_score, is_answer, nd_profile};
use s3gnd_core::hypergraph::{sample_pairs, PairCategory};
use s3gnd_core::*;

const SIGMA: usize = 6;

fn kw(i: usize) -> String {
    format!("w{i}")
}

/// Random graph on `0..n`: keyword bitmasks and optional edge weights in 1..=4.
fn arb_graph(n_range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Graph> {
    n_range
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                prop::collection::vec(0u8..(1 << 3), n),
                prop::collection::vec(prop::option::weighted(0.45, 1u8..=4), pairs),
            )
        })
        .prop_map(|(masks, weights)| {
            let n = masks.len();
            let mut b = Graph::builder().sigma(SIGMA);
            for (v, mask) in masks.iter().enumerate() {
                b.add_vertex(v as VertexId, (0..3).filter(|i| mask & (1 << i) != 0).map(kw))
                    .unwrap();
            }
            let mut it = weights.into_iter();
            for u in 0..n {
                for v in u + 1..n {
                    if let Some(w) = it.next().unwrap() {
                        b.add_edge(u as VertexId, v as VertexId, w as f64).unwrap();
                    }
                }
            }
            b.build().unwrap()
        })
}

/// A connected query on `1..=k` built from a spanning path plus extra edges.
fn arb_query(k_range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = QueryGraph> {
    k_range
        .prop_flat_map(|k| {
            (
                prop::collection::vec(0usize..4, k),
                prop::collection::vec(1u8..=4, k - 1),
                prop::collection::vec(prop::option::weighted(0.3, 1u8..=4), k * (k - 1) / 2),
            )
        })
        .prop_map(|(masks, path, extra)| {
            let k = masks.len();
            let mut b = Graph::builder().sigma(SIGMA);
            // at most one keyword per query vertex keeps instances satisfiable
            for (j, &r) in masks.iter().enumerate() {
                b.add_vertex(j as VertexId + 1, (r < 3).then(|| kw(r))).unwrap();
            }
            for (j, &w) in path.iter().enumerate() {
                b.add_edge(j as VertexId + 1, j as VertexId + 2, w as f64).unwrap();
            }
            let mut it = extra.into_iter();
            for a in 1..=k {
                for c in a + 1..=k {
                    let w = it.next().unwrap();
                    if c > a + 1 {
                        if let Some(w) = w {
                            b.add_edge(a as VertexId, c as VertexId, w as f64).unwrap();
                        }
                    }
                }
            }
            QueryGraph::new(b.build().unwrap()).unwrap()
        })
}

fn arb_params() -> impl Strategy<Value = QueryParams> {
    (0u8..=5, prop::bool::ANY).prop_map(|(d, max)| {
        let f = if max { Aggregate::Max } else { Aggregate::Sum };
        QueryParams::new(d as f64, f).unwrap()
    })
}

fn mappings(answers: &[Answer]) -> BTreeSet<Vec<(VertexId, VertexId)>> {
    answers.iter().map(|a| a.mapping.iter().collect()).collect()
}

/// Second oracle: every ordered k-tuple of distinct vertices, checked with
/// `is_answer`. Shares no enumeration code with the library oracle.
fn tuple_oracle(g: &Graph, q: &QueryGraph, p: &QueryParams) -> BTreeSet<Vec<(VertexId, VertexId)>> {
    let qids: Vec<VertexId> = q.vertices().collect();
    let ids: Vec<VertexId> = g.vertices().collect();
    let mut out = BTreeSet::new();
    let mut chosen = Vec::new();
    fn go(
        g: &Graph,
        q: &QueryGraph,
        p: &QueryParams,
        qids: &[VertexId],
        ids: &[VertexId],
        chosen: &mut Vec<VertexId>,
        out: &mut BTreeSet<Vec<(VertexId, VertexId)>>,
    ) {
        if chosen.len() == qids.len() {
            let m: VertexMapping = qids.iter().copied().zip(chosen.iter().copied()).collect();
            if is_answer(q, g, &m, p).unwrap() {
                out.insert(m.iter().collect());
            }
            return;
        }
        for &v in ids {
            if !chosen.contains(&v) {
                chosen.push(v);
                go(g, q, p, qids, ids, chosen, out);
                chosen.pop();
            }
        }
    }
    go(g, q, p, &qids, &ids, &mut chosen, &mut out);
    out
}

fn engine_answers(g: &Graph, q: &QueryGraph, p: &QueryParams, seed: u64, fanout: usize) -> Vec<Answer> {
    let t = EmbeddingTable::fallback((0..SIGMA).map(kw).collect::<Vec<_>>().iter().map(|s| s.as_str()), 4, seed)
        .unwrap();
    let cfg = BuildConfig { fanout, seed, ..Default::default() };
    let ix = TreeIndex::build(g, &t, &cfg).unwrap();
    let e = QueryEngine::new(g, &ix, &t).unwrap();
    e.query(q, p, &PruneConfig::default()).unwrap().0
}

fn relabel(g: &Graph, shift: VertexId) -> Graph {
    let mut b = Graph::builder().sigma(g.sigma());
    // reverse order so the relabeling is not monotone
    let max = g.vertices().max().unwrap_or(0);
    for v in g.vertices() {
        b.add_vertex(shift + max - v, g.keywords(v).unwrap().iter().cloned()).unwrap();
    }
    for (u, v, w) in g.edges() {
        b.add_edge(shift + max - u, shift + max - v, w).unwrap();
    }
    b.build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn neighbors_are_symmetric(g in arb_graph(2..=9)) {
        for v in g.vertices() {
            for (&u, &w) in g.neighbors(v).unwrap() {
                prop_assert_eq!(g.neighbors(u).unwrap().get(&v), Some(&w));
            }
        }
    }

    #[test]
    fn induced_subgraph_is_monotone(g in arb_graph(3..=9), a in prop::collection::btree_set(0u64..9, 0..9), b in prop::collection::btree_set(0u64..9, 0..9)) {
        let n = g.vertex_count() as u64;
        let small: BTreeSet<_> = a.iter().copied().filter(|&v| v < n).collect();
        let large: BTreeSet<_> = small.iter().chain(b.iter()).copied().filter(|&v| v < n).collect();
        let gs = g.induced_subgraph(&small).unwrap();
        let gl = g.induced_subgraph(&large).unwrap();
        for (u, v, w) in gs.edges() {
            prop_assert_eq!(gl.weight(u, v), Some(w));
            prop_assert_eq!(g.weight(u, v), Some(w));
        }
        prop_assert!(gs.edge_count() <= gl.edge_count());
    }

    #[test]
    fn mbr_subset_containment(seed in 0u64..1000, dim in 2usize..8, a in prop::collection::btree_set(0usize..SIGMA, 0..SIGMA), extra in prop::collection::btree_set(0usize..SIGMA, 0..SIGMA)) {
        let names: Vec<String> = (0..SIGMA).map(kw).collect();
        let t = EmbeddingTable::fallback(names.iter().map(|s| s.as_str()), dim, seed).unwrap();
        let sub: Vec<&str> = a.iter().map(|&i| names[i].as_str()).collect();
        let sup: Vec<&str> = a.union(&extra).map(|&i| names[i].as_str()).collect();
        let ms = Mbr::of_keyword_set(sub.iter().copied(), &t).unwrap();
        let ml = Mbr::of_keyword_set(sup.iter().copied(), &t).unwrap();
        prop_assert!(ml.contains(&ms).unwrap());
        prop_assert!(ml.contains(&ml).unwrap());
        prop_assert!(ms.contains(&Mbr::EmptySet).unwrap());
        if !ms.is_empty_set() {
            prop_assert!(!Mbr::EmptySet.contains(&ms).unwrap());
            prop_assert!(ms.log_area().unwrap() <= ml.log_area().unwrap());
            prop_assert!(ml.area_expansion(&ms).unwrap() == 0.0);
        }
    }

    #[test]
    fn mbr_union_and_order(pts in prop::collection::vec(prop::collection::vec(-5i8..5, 3), 3)) {
        let m: Vec<Mbr> = pts.iter().map(|p| Mbr::point(&p.iter().map(|&x| x as f64).collect::<Vec<_>>())).collect();
        let ab = m[0].union(&m[1]).unwrap();
        let abc = ab.union(&m[2]).unwrap();
        prop_assert!(ab.contains(&m[0]).unwrap() && ab.contains(&m[1]).unwrap());
        prop_assert_eq!(&ab, &m[1].union(&m[0]).unwrap());
        prop_assert_eq!(&abc, &m[0].union(&m[1].union(&m[2]).unwrap()).unwrap());
        // transitivity through the union chain
        prop_assert!(abc.contains(&ab).unwrap() && abc.contains(&m[0]).unwrap());
        prop_assert!(abc.log_area().unwrap() >= ab.log_area().unwrap());
        // antisymmetry
        if ab.contains(&m[2]).unwrap() && m[2].contains(&ab).unwrap() {
            prop_assert_eq!(&ab, &m[2]);
        }
        prop_assert!(ab.area_expansion(&m[2]).unwrap() >= 0.0);
    }

    #[test]
    fn lb_nd_bounds_every_mapping(g in arb_graph(4..=8), q in arb_query(2..=4), picks in prop::collection::vec(0usize..8, 4)) {
        let ids: Vec<VertexId> = g.vertices().collect();
        let mut used = BTreeSet::new();
        let mut m = VertexMapping::new();
        for (qj, &p) in q.vertices().zip(picks.iter()) {
            let mut i = p % ids.len();
            while used.contains(&i) {
                i = (i + 1) % ids.len();
            }
            used.insert(i);
            m.insert(qj, ids[i]);
        }
        let nds = nd_profile(&q, &g, &m).unwrap();
        let mut lbs = Vec::new();
        for (pos, (qj, vi)) in m.iter().enumerate() {
            let lb = lb_nd(&weight_list(&q, qj).unwrap(), &weight_list(&g, vi).unwrap());
            prop_assert!(lb <= nds[pos] + 1e-12);
            lbs.push(lb);
        }
        let max = gnd_score(&q, &g, &m, Aggregate::Max).unwrap();
        let sum = gnd_score(&q, &g, &m, Aggregate::Sum).unwrap();
        prop_assert!(sum >= max);
        prop_assert!(s3gnd_core::bounds::lb_gnd(&lbs, Aggregate::Sum).unwrap() <= sum + 1e-12);
        prop_assert!(s3gnd_core::bounds::lb_gnd(&lbs, Aggregate::Max).unwrap() <= max + 1e-12);
    }

    #[test]
    fn node_aggregate_weakens_bound(lists in prop::collection::vec(prop::collection::vec(1u8..=6, 0..5), 1..5), ql in prop::collection::vec(1u8..=6, 0..5), delta in 0u8..6) {
        let lists: Vec<SortedWeightList> = lists.iter().map(|l| SortedWeightList::new(l.iter().map(|&w| w as f64).collect()).unwrap()).collect();
        let q = SortedWeightList::new(ql.iter().map(|&w| w as f64).collect()).unwrap();
        let mut node = SortedWeightList::default();
        for l in &lists {
            node.dominate(l);
        }
        for l in &lists {
            prop_assert!(node.dominates(l));
            prop_assert!(lb_nd(&q, &node) <= lb_nd(&q, l));
            if node_prunable_nd(&node, std::slice::from_ref(&q), delta as f64) {
                prop_assert!(lb_nd(&q, l) > delta as f64);
            }
        }
    }

    #[test]
    fn nd_grows_when_data_weights_shrink(g in arb_graph(4..=7), q in arb_query(2..=3)) {
        let ids: Vec<VertexId> = g.vertices().collect();
        let m: VertexMapping = q.vertices().zip(ids.iter().copied()).collect();
        let before = nd_profile(&q, &g, &m).unwrap();
        // halve every data edge weight
        let mut b = Graph::builder().sigma(g.sigma());
        for v in g.vertices() {
            b.add_vertex(v, g.keywords(v).unwrap().iter().cloned()).unwrap();
        }
        for (u, v, w) in g.edges() {
            b.add_edge(u, v, w / 2.0).unwrap();
        }
        let lighter = b.build().unwrap();
        let after = nd_profile(&q, &lighter, &m).unwrap();
        for (x, y) in before.iter().zip(&after) {
            prop_assert!(y >= x);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_matches_tuple_enumeration(g in arb_graph(3..=7), q in arb_query(2..=3), p in arb_params()) {
        let fast = mappings(&brute_force_s3gnd(&g, &q, &p).unwrap());
        prop_assert_eq!(fast, tuple_oracle(&g, &q, &p));
    }

    #[test]
    fn oracle_is_relabel_invariant(g in arb_graph(3..=8), q in arb_query(2..=3), p in arb_params()) {
        let shift = 100;
        let max = g.vertices().max().unwrap();
        let h = relabel(&g, shift);
        let back: BTreeSet<Vec<(VertexId, VertexId)>> = mappings(&brute_force_s3gnd(&h, &q, &p).unwrap())
            .into_iter()
            .map(|m| m.into_iter().map(|(qj, v)| (qj, shift + max - v)).collect())
            .collect();
        prop_assert_eq!(mappings(&brute_force_s3gnd(&g, &q, &p).unwrap()), back);
    }

    #[test]
    fn engine_matches_oracle(g in arb_graph(3..=10), q in arb_query(2..=4), p in arb_params(), seed in 0u64..4, fanout in 2usize..5) {
        let oracle = brute_force_s3gnd(&g, &q, &p).unwrap();
        let got = engine_answers(&g, &q, &p, seed, fanout);
        prop_assert_eq!(mappings(&got), mappings(&oracle));
        for a in &got {
            prop_assert!(is_answer(&q, &g, &a.mapping, &p).unwrap());
        }
    }

    #[test]
    fn answers_grow_with_delta(g in arb_graph(3..=9), q in arb_query(2..=3), sum in prop::bool::ANY) {
        let f = if sum { Aggregate::Sum } else { Aggregate::Max };
        let mut prev = BTreeSet::new();
        for d in 0..=4 {
            let cur = mappings(&engine_answers(&g, &q, &QueryParams::new(d as f64, f).unwrap(), 0, 3));
            prop_assert!(prev.is_subset(&cur));
            prev = cur;
        }
    }

    #[test]
    fn pair_categories_partition(masks in prop::collection::vec(1u8..64, 2..20), seed in 0u64..100, base in 1usize..6) {
        let mut b = Graph::builder().sigma(SIGMA);
        for (v, m) in masks.iter().enumerate() {
            b.add_vertex(v as VertexId, (0..SIGMA).filter(|i| m & (1 << i) != 0).map(kw)).unwrap();
        }
        let g = b.build().unwrap();
        let h = KeywordHypergraph::build(&g);
        let total: u64 = h.total_weight();
        prop_assert_eq!(total as usize, masks.len());
        if h.hyperedges().len() < 2 {
            return Ok(());
        }
        let (ds, _) = sample_pairs(&h, base, seed).unwrap();
        let mut seen = BTreeMap::new();
        for c in [PairCategory::Containment, PairCategory::Intersection, PairCategory::Disjoint] {
            prop_assert!(ds.category(c).len() <= 2 * base);
            for &(x, y) in ds.category(c) {
                prop_assert_ne!(x, y);
                prop_assert_eq!(h.relation(x, y), c);
                prop_assert!(seen.insert((x.min(y), x.max(y)), c).is_none());
            }
        }
    }
}
