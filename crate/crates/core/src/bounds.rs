//! Sorted edge-weight lists, ND/GND lower bounds, and the pruning predicates.
//!
//! Pairing the i-th largest query weight with the i-th largest data weight
//! minimizes `Σ max{w_q - w_d, 0}` over all neighbor matchings, so it bounds
//! the ND of any mapping from below. Lists are zero-padded on the right: a
//! vertex with fewer neighbors than the query vertex pays for the missing
//! edges in full.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gnd::Aggregate;
use crate::graph::{Graph, VertexId};
use crate::mbr::Mbr;

/// Positive weights in non-ascending order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SortedWeightList(Vec<f64>);

impl SortedWeightList {
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if let Some(&w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidConfig(alloc::format!(
                "weight list entries must be positive and finite, got {w}"
            )));
        }
        weights.sort_by(|a, b| b.total_cmp(a));
        Ok(SortedWeightList(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The `z`-th entry (0-based), reading 0 past the end.
    pub fn get(&self, z: usize) -> f64 {
        self.0.get(z).copied().unwrap_or(0.0)
    }

    /// Raises `self` to the element-wise maximum of `self` and `other`.
    pub fn dominate(&mut self, other: &SortedWeightList) {
        for (z, &w) in other.0.iter().enumerate() {
            match self.0.get_mut(z) {
                Some(mine) => *mine = mine.max(w),
                None => self.0.push(w),
            }
        }
    }

    /// Whether `self[z] ≥ other[z]` for every position.
    pub fn dominates(&self, other: &SortedWeightList) -> bool {
        (0..other.len()).all(|z| self.get(z) >= other.get(z))
    }
}

/// Per-vertex pruning payload: keyword MBR and sorted incident weights.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexAux {
    pub mbr: Mbr,
    pub wlist: SortedWeightList,
}

/// Incident edge weights of `v`, largest first.
pub fn weight_list(g: &Graph, v: VertexId) -> Result<SortedWeightList> {
    SortedWeightList::new(g.neighbors(v)?.values().copied().collect())
}

/// `Σ_z max{q[z] - v[z], 0}` over the query list's positions.
pub fn lb_nd(qlist: &SortedWeightList, vlist: &SortedWeightList) -> f64 {
    qlist
        .0
        .iter()
        .enumerate()
        .map(|(z, &wq)| (wq - vlist.get(z)).max(0.0))
        .sum()
}

/// Aggregate of per-pair ND lower bounds.
pub fn lb_gnd(per_pair: &[f64], f: Aggregate) -> Result<f64> {
    if per_pair.is_empty() {
        return Err(Error::EmptyList);
    }
    Ok(f.apply(per_pair.iter().copied()))
}

/// A data vertex can host none of the query vertices: no query MBR fits
/// inside its MBR.
pub fn vertex_prunable_keyword(v_mbr: &Mbr, q_mbrs: &[Mbr]) -> Result<bool> {
    for qm in q_mbrs {
        if v_mbr.contains(qm)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn vertex_prunable_nd(qlist: &SortedWeightList, vlist: &SortedWeightList, delta: f64) -> bool {
    lb_nd(qlist, vlist) > delta
}

/// Index-level keyword pruning; `node_mbr` must cover every member's MBR.
pub fn node_prunable_keyword(node_mbr: &Mbr, q_mbrs: &[Mbr]) -> Result<bool> {
    vertex_prunable_keyword(node_mbr, q_mbrs)
}

/// Index-level ND pruning; `node_list` must dominate every member's list.
pub fn node_prunable_nd(node_list: &SortedWeightList, q_lists: &[SortedWeightList], delta: f64) -> bool {
    q_lists.iter().all(|ql| lb_nd(ql, node_list) > delta)
}

/// Mapping-level pruning by the GND lower bound.
pub fn graph_prunable(per_pair: &[f64], f: Aggregate, delta: f64) -> Result<bool> {
    Ok(lb_gnd(per_pair, f)? > delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::graph;
    use alloc::vec;

    fn list(ws: &[f64]) -> SortedWeightList {
        SortedWeightList::new(ws.to_vec()).unwrap()
    }

    #[test]
    fn weight_lists() {
        let g = graph(
            &[(0, &[]), (1, &[]), (2, &[]), (3, &[]), (4, &[])],
            &[(0, 1, 3.0), (0, 2, 5.0), (0, 3, 2.0)],
        );
        assert!(weight_list(&g, 4).unwrap().is_empty());
        assert_eq!(weight_list(&g, 0).unwrap().as_slice(), &[5.0, 3.0, 2.0]);
        assert!(weight_list(&g, 9).is_err());
        let star = graph(&[(0, &[]), (1, &[]), (2, &[])], &[(0, 1, 4.0), (0, 2, 4.0)]);
        assert_eq!(weight_list(&star, 0).unwrap().as_slice(), &[4.0, 4.0]);
        assert!(SortedWeightList::new(vec![1.0, 0.0]).is_err());
    }

    /// Minimum over every assignment of query weights to distinct positions of
    /// the zero-padded data list.
    fn min_matching_cost(q: &[f64], v: &[f64]) -> (f64, Vec<f64>) {
        let mut padded = v.to_vec();
        padded.resize(v.len().max(q.len()), 0.0);
        let mut costs = Vec::new();
        let mut used = vec![false; padded.len()];
        fn go(j: usize, q: &[f64], p: &[f64], used: &mut [bool], acc: f64, out: &mut Vec<f64>) {
            if j == q.len() {
                out.push(acc);
                return;
            }
            for i in 0..p.len() {
                if !used[i] {
                    used[i] = true;
                    go(j + 1, q, p, used, acc + (q[j] - p[i]).max(0.0), out);
                    used[i] = false;
                }
            }
        }
        go(0, q, &padded, &mut used, 0.0, &mut costs);
        let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
        (min, costs)
    }

    #[test]
    fn lb_nd_examples() {
        let q = list(&[5.0, 3.0]);
        assert_eq!(lb_nd(&q, &q), 0.0);
        assert_eq!(lb_nd(&list(&[3.0]), &list(&[])), 3.0);

        let v = list(&[6.0, 2.0]);
        let (min, mut all) = min_matching_cost(&[5.0, 3.0], &[6.0, 2.0]);
        all.sort_by(f64::total_cmp);
        assert_eq!(all, vec![1.0, 3.0]);
        assert_eq!(min, 1.0);
        assert_eq!(lb_nd(&q, &v), 1.0);
    }

    #[test]
    fn lb_gnd_examples() {
        assert_eq!(lb_gnd(&[0.0, 0.0], Aggregate::Sum).unwrap(), 0.0);
        assert_eq!(lb_gnd(&[1.0, 2.0], Aggregate::Sum).unwrap(), 3.0);
        assert_eq!(lb_gnd(&[1.0, 2.0], Aggregate::Max).unwrap(), 2.0);
        assert_eq!(lb_gnd(&[], Aggregate::Max).unwrap_err(), Error::EmptyList);
        assert!(graph_prunable(&[1.0, 2.0], Aggregate::Sum, 2.5).unwrap());
        assert!(!graph_prunable(&[1.0, 2.0], Aggregate::Sum, 3.0).unwrap());
    }

    #[test]
    fn keyword_predicates() {
        let unit = Mbr::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let inside = Mbr::point(&[0.5, 0.5]);
        let outside = Mbr::point(&[2.0, 0.5]);
        assert!(!vertex_prunable_keyword(&unit, &[outside.clone(), inside.clone()]).unwrap());
        assert!(vertex_prunable_keyword(&unit, &[outside.clone()]).unwrap());
        assert!(!vertex_prunable_keyword(&unit, &[outside.clone(), Mbr::EmptySet]).unwrap());

        // a node covering one surviving member survives
        let member = Mbr::point(&[2.0, 0.5]);
        let node = unit.union(&member).unwrap();
        assert!(!vertex_prunable_keyword(&member, &[outside.clone()]).unwrap());
        assert!(!node_prunable_keyword(&node, &[outside.clone()]).unwrap());
        assert!(node_prunable_keyword(&node, &[Mbr::point(&[9.0, 9.0])]).unwrap());
        for q in [&inside, &outside] {
            assert_eq!(
                node_prunable_keyword(&unit, core::slice::from_ref(q)).unwrap(),
                vertex_prunable_keyword(&unit, core::slice::from_ref(q)).unwrap()
            );
        }
    }

    #[test]
    fn nd_predicates() {
        assert!(!vertex_prunable_nd(&list(&[2.0]), &list(&[2.0]), 0.0));
        assert!(vertex_prunable_nd(&list(&[5.0, 3.0]), &list(&[6.0, 2.0]), 0.5));
        assert!(!vertex_prunable_nd(&list(&[5.0, 3.0]), &list(&[]), 1e300));

        let mut node = list(&[5.0, 3.0]);
        node.dominate(&list(&[4.0, 4.0]));
        assert_eq!(node.as_slice(), &[5.0, 4.0]);
        let q = list(&[5.0, 5.0, 1.0]);
        for member in [list(&[5.0, 3.0]), list(&[4.0, 4.0])] {
            assert!(node.dominates(&member));
            assert!(lb_nd(&q, &node) <= lb_nd(&q, &member));
        }

        // an isolated query vertex has lb 0 and blocks node pruning
        assert!(!node_prunable_nd(&list(&[]), &[list(&[3.0]), list(&[])], 1.0));
        assert!(node_prunable_nd(&list(&[]), &[list(&[3.0])], 1.0));
        assert!(!node_prunable_nd(&list(&[]), &[list(&[3.0])], 3.0));
    }
}
