//! The keyword hypergraph of a data graph and hyperedge pair sampling for
//! embedding training.
//!
//! Keywords become hypergraph vertices; each distinct non-empty vertex
//! keyword set becomes a hyperedge weighted by how many data vertices carry
//! exactly that set.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{is_valid_keyword, Graph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    /// Sorted keyword indices.
    pub keywords: Vec<usize>,
    /// Number of data vertices whose keyword set equals this hyperedge.
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordHypergraph {
    keywords: Vec<String>,
    hyperedges: Vec<Hyperedge>,
}

impl KeywordHypergraph {
    pub fn build(g: &Graph) -> Self {
        let mut counts: BTreeMap<Vec<&str>, u64> = BTreeMap::new();
        for v in g.vertices() {
            let kws = g.keywords(v).unwrap();
            if !kws.is_empty() {
                *counts.entry(kws.iter().map(String::as_str).collect()).or_default() += 1;
            }
        }
        let keywords: Vec<String> = counts
            .keys()
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(String::from)
            .collect();
        let hyperedges = counts
            .into_iter()
            .map(|(set, weight)| Hyperedge {
                keywords: set
                    .iter()
                    .map(|k| keywords.binary_search_by(|x| x.as_str().cmp(k)).unwrap())
                    .collect(),
                weight,
            })
            .collect();
        KeywordHypergraph {
            keywords,
            hyperedges,
        }
    }

    /// Validating constructor for deserialized hypergraphs.
    pub fn from_parts(keywords: Vec<String>, hyperedges: Vec<Hyperedge>) -> Result<Self> {
        for k in &keywords {
            if !is_valid_keyword(k) {
                return Err(Error::InvalidKeyword(k.clone()));
            }
        }
        let distinct: BTreeSet<&String> = keywords.iter().collect();
        if distinct.len() != keywords.len() {
            let dup = keywords.iter().find(|k| keywords.iter().filter(|x| x == k).count() > 1);
            return Err(Error::DuplicateKeyword(dup.unwrap().clone()));
        }
        let mut seen = BTreeSet::new();
        for (i, e) in hyperedges.iter().enumerate() {
            let sorted = e.keywords.windows(2).all(|w| w[0] < w[1]);
            let in_range = e.keywords.iter().all(|&k| k < keywords.len());
            if e.keywords.is_empty() || !sorted || !in_range || e.weight == 0 || !seen.insert(&e.keywords) {
                return Err(Error::UnknownHyperedge(i));
            }
        }
        Ok(KeywordHypergraph {
            keywords,
            hyperedges,
        })
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn hyperedges(&self) -> &[Hyperedge] {
        &self.hyperedges
    }

    pub fn keyword_index(&self, k: &str) -> Option<usize> {
        self.keywords.iter().position(|x| x == k)
    }

    /// Keyword names of hyperedge `e`.
    pub fn hyperedge_keywords(&self, e: usize) -> Result<Vec<&str>> {
        let edge = self.hyperedges.get(e).ok_or(Error::UnknownHyperedge(e))?;
        Ok(edge.keywords.iter().map(|&k| self.keywords[k].as_str()).collect())
    }

    /// Incidence of keyword `k` on hyperedge `e`.
    pub fn incidence(&self, k: &str, e: usize) -> Result<bool> {
        let ki = self
            .keyword_index(k)
            .ok_or_else(|| Error::UnknownKeyword(k.into()))?;
        let edge = self.hyperedges.get(e).ok_or(Error::UnknownHyperedge(e))?;
        Ok(edge.keywords.binary_search(&ki).is_ok())
    }

    pub fn total_weight(&self) -> u64 {
        self.hyperedges.iter().map(|e| e.weight).sum()
    }

    /// Set relation between two hyperedges.
    pub fn relation(&self, a: usize, b: usize) -> PairCategory {
        let (x, y) = (&self.hyperedges[a].keywords, &self.hyperedges[b].keywords);
        let common = sorted_intersection_len(x, y);
        if common == x.len() || common == y.len() {
            PairCategory::Containment
        } else if common > 0 {
            PairCategory::Intersection
        } else {
            PairCategory::Disjoint
        }
    }

    /// All pairs `(a, b)` with `a`'s keyword set strictly inside `b`'s,
    /// found through a keyword-to-hyperedge inverted index.
    pub fn containment_pairs(&self) -> Vec<(usize, usize)> {
        let mut postings: Vec<Vec<usize>> = alloc::vec![Vec::new(); self.keywords.len()];
        for (e, edge) in self.hyperedges.iter().enumerate() {
            for &k in &edge.keywords {
                postings[k].push(e);
            }
        }
        let mut pairs = Vec::new();
        for (a, edge) in self.hyperedges.iter().enumerate() {
            let mut lists: Vec<&Vec<usize>> = edge.keywords.iter().map(|&k| &postings[k]).collect();
            lists.sort_by_key(|l| l.len());
            let mut supersets = lists[0].clone();
            for l in &lists[1..] {
                supersets.retain(|e| l.binary_search(e).is_ok());
            }
            pairs.extend(supersets.into_iter().filter(|&b| b != a).map(|b| (a, b)));
        }
        pairs
    }
}

fn sorted_intersection_len(x: &[usize], y: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairCategory {
    /// One keyword set strictly contains the other.
    Containment,
    /// Overlapping, neither contains the other.
    Intersection,
    /// No common keyword.
    Disjoint,
}

impl fmt::Display for PairCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairCategory::Containment => "containment",
            PairCategory::Intersection => "intersection",
            PairCategory::Disjoint => "disjoint",
        })
    }
}

/// Hyperedge pairs by set relation. Containment pairs are ordered
/// `(subset, superset)`; the others `(smaller id, larger id)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairDataset {
    pub containment: Vec<(usize, usize)>,
    pub intersection: Vec<(usize, usize)>,
    pub disjoint: Vec<(usize, usize)>,
    pub seed: u64,
}

impl PairDataset {
    pub fn category(&self, c: PairCategory) -> &[(usize, usize)] {
        match c {
            PairCategory::Containment => &self.containment,
            PairCategory::Intersection => &self.intersection,
            PairCategory::Disjoint => &self.disjoint,
        }
    }
}

/// A category that could not be filled to its target size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingShortfall {
    pub category: PairCategory,
    pub target: usize,
    pub found: usize,
}

impl fmt::Display for SamplingShortfall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} pairs: found {} of {} requested",
            self.category, self.found, self.target
        )
    }
}

/// Hypergraphs with at most this many hyperedge pairs are classified
/// exhaustively; larger ones are sampled by rejection.
const EXHAUSTIVE_PAIR_LIMIT: usize = 4_000_000;

/// `min(|containment pairs|, 10_000)`, at least 1.
pub fn default_base_count(h: &KeywordHypergraph) -> usize {
    h.containment_pairs().len().clamp(1, 10_000)
}

/// Samples `2 · base_count` pairs per category. The disjoint category is
/// later split in two by the trainer, giving roughly 2:2:1:1.
pub fn sample_pairs(
    h: &KeywordHypergraph,
    base_count: usize,
    seed: u64,
) -> Result<(PairDataset, Vec<SamplingShortfall>)> {
    let m = h.hyperedges.len();
    if m < 2 {
        return Err(Error::TooFewHyperedges(m));
    }
    if base_count == 0 {
        return Err(Error::InvalidConfig("base_count must be positive".into()));
    }
    let target = 2 * base_count;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut containment = h.containment_pairs();
    containment.shuffle(&mut rng);
    containment.truncate(target);

    let (mut intersection, mut disjoint) = (Vec::new(), Vec::new());
    if m * (m - 1) / 2 <= EXHAUSTIVE_PAIR_LIMIT {
        for a in 0..m {
            for b in a + 1..m {
                match h.relation(a, b) {
                    PairCategory::Intersection => intersection.push((a, b)),
                    PairCategory::Disjoint => disjoint.push((a, b)),
                    PairCategory::Containment => {}
                }
            }
        }
        intersection.shuffle(&mut rng);
        disjoint.shuffle(&mut rng);
        intersection.truncate(target);
        disjoint.truncate(target);
    } else {
        let mut seen = BTreeSet::new();
        let mut attempts = 0;
        while (intersection.len() < target || disjoint.len() < target) && attempts < 50 * target {
            attempts += 1;
            let (a, b) = (rng.gen_range(0..m), rng.gen_range(0..m));
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                continue;
            }
            let pair = (a.min(b), a.max(b));
            match h.relation(a, b) {
                PairCategory::Intersection if intersection.len() < target => intersection.push(pair),
                PairCategory::Disjoint if disjoint.len() < target => disjoint.push(pair),
                _ => {}
            }
        }
    }

    let shortfalls = [
        (PairCategory::Containment, containment.len()),
        (PairCategory::Intersection, intersection.len()),
        (PairCategory::Disjoint, disjoint.len()),
    ]
    .into_iter()
    .filter(|&(_, found)| found < target)
    .map(|(category, found)| SamplingShortfall {
        category,
        target,
        found,
    })
    .collect();
    Ok((
        PairDataset {
            containment,
            intersection,
            disjoint,
            seed,
        },
        shortfalls,
    ))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::tests::graph;

    /// Five vertices in the spirit of the hypergraph construction figure:
    /// v1 holds all four keywords, v3 and v5 share {k2, k3, k4}.
    pub(crate) fn figure_graph() -> Graph {
        graph(
            &[
                (1, &["k1", "k2", "k3", "k4"]),
                (2, &["k1", "k2"]),
                (3, &["k2", "k3", "k4"]),
                (4, &["k3"]),
                (5, &["k2", "k3", "k4"]),
            ],
            &[(1, 2, 1.0), (2, 3, 2.0), (3, 4, 1.0), (4, 5, 3.0), (1, 5, 2.0)],
        )
    }

    fn edge_id(h: &KeywordHypergraph, kws: &[&str]) -> usize {
        (0..h.hyperedges().len())
            .find(|&e| h.hyperedge_keywords(e).unwrap() == kws)
            .unwrap()
    }

    #[test]
    fn figure_hypergraph() {
        let h = KeywordHypergraph::build(&figure_graph());
        assert_eq!(h.keywords(), &["k1", "k2", "k3", "k4"]);
        let all = edge_id(&h, &["k1", "k2", "k3", "k4"]);
        let shared = edge_id(&h, &["k2", "k3", "k4"]);
        assert_eq!(h.hyperedges()[all].weight, 1);
        assert_eq!(h.hyperedges()[shared].weight, 2);
        assert_eq!(h.total_weight(), 5);

        assert!(h.incidence("k1", all).unwrap());
        assert!(!h.incidence("k1", shared).unwrap());
        let single = edge_id(&h, &["k3"]);
        assert!(h.incidence("k3", single).unwrap());
        assert!(matches!(h.incidence("k9", 0), Err(Error::UnknownKeyword(_))));
        assert_eq!(h.incidence("k1", 99).unwrap_err(), Error::UnknownHyperedge(99));
    }

    #[test]
    fn uniform_keyword_sets_collapse() {
        let g = graph(&[(1, &["a", "b"]), (2, &["a", "b"]), (3, &["a", "b"])], &[]);
        let h = KeywordHypergraph::build(&g);
        assert_eq!(h.hyperedges().len(), 1);
        assert_eq!(h.hyperedges()[0].weight, 3);
    }

    #[test]
    fn empty_keyword_sets_are_skipped() {
        let g = graph(&[(1, &[]), (2, &["a"])], &[]);
        let h = KeywordHypergraph::build(&g);
        assert_eq!(h.total_weight(), 1);
        let none = KeywordHypergraph::build(&graph(&[(1, &[])], &[]));
        assert!(none.hyperedges().is_empty());
        assert_eq!(sample_pairs(&none, 1, 0).unwrap_err(), Error::TooFewHyperedges(0));
    }

    #[test]
    fn containment_only() {
        let h = KeywordHypergraph::build(&graph(&[(1, &["a"]), (2, &["a", "b"])], &[]));
        let (ds, short) = sample_pairs(&h, 1, 3).unwrap();
        let a = edge_id(&h, &["a"]);
        let ab = edge_id(&h, &["a", "b"]);
        assert_eq!(ds.containment, alloc::vec![(a, ab)]);
        assert!(ds.intersection.is_empty() && ds.disjoint.is_empty());
        let cats: Vec<_> = short.iter().map(|s| s.category).collect();
        assert!(cats.contains(&PairCategory::Intersection) && cats.contains(&PairCategory::Disjoint));
    }

    #[test]
    fn disjoint_only() {
        let h = KeywordHypergraph::build(&graph(&[(1, &["a"]), (2, &["b"])], &[]));
        let (ds, short) = sample_pairs(&h, 1, 3).unwrap();
        assert_eq!(ds.disjoint, alloc::vec![(0, 1)]);
        assert!(ds.containment.is_empty() && ds.intersection.is_empty());
        assert_eq!(short.len(), 3);
    }

    #[test]
    fn sampling_is_deterministic_and_partitioned() {
        let h = KeywordHypergraph::build(&figure_graph());
        let (a, _) = sample_pairs(&h, 2, 11).unwrap();
        let (b, _) = sample_pairs(&h, 2, 11).unwrap();
        assert_eq!(a, b);
        for cat in [PairCategory::Containment, PairCategory::Intersection, PairCategory::Disjoint] {
            let pairs = a.category(cat);
            assert!(pairs.len() <= 4);
            let unique: BTreeSet<_> = pairs.iter().map(|&(x, y)| (x.min(y), x.max(y))).collect();
            assert_eq!(unique.len(), pairs.len());
            for &(x, y) in pairs {
                assert_eq!(h.relation(x, y), cat);
            }
        }
        for &(sub, sup) in &a.containment {
            let (s, p) = (&h.hyperedges()[sub].keywords, &h.hyperedges()[sup].keywords);
            assert!(s.len() < p.len() && s.iter().all(|k| p.contains(k)));
        }
    }

    #[test]
    fn from_parts_validates() {
        let ok = KeywordHypergraph::from_parts(
            alloc::vec!["a".into(), "b".into()],
            alloc::vec![Hyperedge { keywords: alloc::vec![0, 1], weight: 2 }],
        );
        assert!(ok.is_ok());
        let dup = KeywordHypergraph::from_parts(
            alloc::vec!["a".into()],
            alloc::vec![
                Hyperedge { keywords: alloc::vec![0], weight: 1 },
                Hyperedge { keywords: alloc::vec![0], weight: 1 },
            ],
        );
        assert_eq!(dup.unwrap_err(), Error::UnknownHyperedge(1));
    }
}
