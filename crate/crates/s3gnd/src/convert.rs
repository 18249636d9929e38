//! Converter from the common edge-list plus labels layout of public graph
//! datasets.
//!
//! Edge file: one `<u> <v> [<weight>]` per line; weight defaults to 1.
//! Labels file: `<id> <label> [<label> ...]`; labels may also be
//! comma-separated. Lines starting with `#` or `%` are comments.
//!
//! Edges listed in both directions collapse into one when the weights
//! agree. Self-loops are dropped and counted.

use std::collections::{BTreeMap, BTreeSet};

use s3gnd_core::{Graph, VertexId};

use crate::error::{AtLine, Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConvertReport {
    pub self_loops: usize,
    pub repeated_edges: usize,
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#') && !l.starts_with('%')).then_some((i + 1, l))
    })
}

pub fn convert_edge_list(edges: &str, labels: Option<&str>) -> Result<(Graph, ConvertReport)> {
    let mut keywords: BTreeMap<VertexId, BTreeSet<String>> = BTreeMap::new();
    if let Some(labels) = labels {
        for (line, l) in lines(labels) {
            let mut it = l.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
            let id = it.next().unwrap();
            let id: VertexId = id.parse().map_err(|_| Error::parse(line, format!("labels: bad vertex id {id:?}")))?;
            keywords.entry(id).or_default().extend(it.map(str::to_string));
        }
    }

    let mut report = ConvertReport::default();
    let mut weights: BTreeMap<(VertexId, VertexId), (usize, f64)> = BTreeMap::new();
    for (line, l) in lines(edges) {
        let f: Vec<&str> = l.split_whitespace().collect();
        if !(2..=3).contains(&f.len()) {
            return Err(Error::parse(line, "edges: expected `<u> <v> [<weight>]`"));
        }
        let id = |s: &str| s.parse::<VertexId>().map_err(|_| Error::parse(line, format!("edges: bad vertex id {s:?}")));
        let (u, v) = (id(f[0])?, id(f[1])?);
        let w: f64 = match f.get(2) {
            Some(s) => s.parse().map_err(|_| Error::parse(line, format!("edges: bad weight {s:?}")))?,
            None => 1.0,
        };
        keywords.entry(u).or_default();
        keywords.entry(v).or_default();
        if u == v {
            report.self_loops += 1;
            continue;
        }
        match weights.get(&(u.min(v), u.max(v))) {
            Some(&(_, old)) if old == w => report.repeated_edges += 1,
            Some(&(first, old)) => {
                return Err(Error::parse(
                    line,
                    format!("edges: {u}-{v} has weight {w} here but {old} on line {first}"),
                ))
            }
            None => {
                weights.insert((u.min(v), u.max(v)), (line, w));
            }
        }
    }

    let mut b = Graph::builder();
    for (v, kws) in keywords {
        b.add_vertex(v, kws)?;
    }
    for ((u, v), (line, w)) in weights {
        b.add_edge(u, v, w).at_line(line)?;
    }
    Ok((b.build()?, report))
}
