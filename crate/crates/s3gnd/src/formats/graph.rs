//! Line-oriented graph text format, shared by data and query graphs.
//!
//! ```text
//! # comment
//! g <|V|> <|E|> <|Sigma|>
//! v <id> <kw1>,<kw2>,...     (or `v <id> -` for no keywords)
//! e <id1> <id2> <weight>
//! ```
//!
//! The header is optional; without it the keyword domain is the set of
//! keywords in use. Vertices must be declared before the edges that use them.

use std::fmt::Write as _;
use std::path::Path;

use s3gnd_core::{Graph, QueryGraph, VertexId};

use super::{read_text, records, write_text};
use crate::error::{AtLine, Error, Result};

struct Header {
    line: usize,
    vertices: usize,
    edges: usize,
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut b = Graph::builder();
    let mut header: Option<Header> = None;
    let mut seen_records = false;
    for (line, fields) in records(text) {
        match fields[0] {
            "g" => {
                if header.is_some() || seen_records {
                    return Err(Error::parse(line, "header must be the first record"));
                }
                let [v, e, s] = numbers::<3>(line, &fields)?;
                b.set_sigma(s);
                header = Some(Header { line, vertices: v, edges: e });
            }
            "v" => {
                seen_records = true;
                if fields.len() != 3 {
                    return Err(Error::parse(line, "expected `v <id> <keywords>`"));
                }
                let id = parse_id(line, fields[1])?;
                let kws: Vec<&str> = match fields[2] {
                    "-" => Vec::new(),
                    list => list.split(',').collect(),
                };
                b.add_vertex(id, kws).at_line(line)?;
            }
            "e" => {
                seen_records = true;
                if fields.len() != 4 {
                    return Err(Error::parse(line, "expected `e <id1> <id2> <weight>`"));
                }
                let u = parse_id(line, fields[1])?;
                let v = parse_id(line, fields[2])?;
                let w: f64 = fields[3]
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad weight {:?}", fields[3])))?;
                b.add_edge(u, v, w).at_line(line)?;
            }
            tag => return Err(Error::parse(line, format!("unknown record type {tag:?}"))),
        }
    }
    let g = b.build()?;
    if let Some(h) = header {
        if h.vertices != g.vertex_count() || h.edges != g.edge_count() {
            return Err(Error::parse(
                h.line,
                format!(
                    "header declares {} vertices and {} edges, file has {} and {}",
                    h.vertices,
                    h.edges,
                    g.vertex_count(),
                    g.edge_count()
                ),
            ));
        }
    }
    Ok(g)
}

pub fn parse_query(text: &str) -> Result<QueryGraph> {
    Ok(QueryGraph::new(parse_graph(text)?)?)
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "g {} {} {}", g.vertex_count(), g.edge_count(), g.sigma()).unwrap();
    for v in g.vertices() {
        let kws = g.keywords(v).unwrap();
        if kws.is_empty() {
            writeln!(out, "v {v} -").unwrap();
        } else {
            let list: Vec<&str> = kws.iter().map(String::as_str).collect();
            writeln!(out, "v {v} {}", list.join(",")).unwrap();
        }
    }
    // `{}` on f64 prints the shortest string that parses back to the same value
    for (u, v, w) in g.edges() {
        writeln!(out, "e {u} {v} {w}").unwrap();
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    parse_graph(&read_text(path.as_ref())?)
}

pub fn read_query(path: impl AsRef<Path>) -> Result<QueryGraph> {
    parse_query(&read_text(path.as_ref())?)
}

pub fn write_graph(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    write_text(path.as_ref(), &format_graph(g))
}

fn parse_id(line: usize, s: &str) -> Result<VertexId> {
    s.parse().map_err(|_| Error::parse(line, format!("bad vertex id {s:?}")))
}

fn numbers<const N: usize>(line: usize, fields: &[&str]) -> Result<[usize; N]> {
    if fields.len() != N + 1 {
        return Err(Error::parse(line, format!("expected {N} numbers after {:?}", fields[0])));
    }
    let mut out = [0; N];
    for (slot, s) in out.iter_mut().zip(&fields[1..]) {
        *slot = s.parse().map_err(|_| Error::parse(line, format!("bad count {s:?}")))?;
    }
    Ok(out)
}
