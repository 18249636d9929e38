//! Answer stream and stats record.
//!
//! ```text
//! a <gnd> <qid1>:<vid1> <qid2>:<vid2> ...
//! stats pruning_power=<r> candidates=<n> answers=<n> wall_ms=<n>
//! ```
//!
//! Pairs are in query-vertex order; lines are sorted by (gnd, vertex set).

use std::fmt::Write as _;

use s3gnd_core::{Answer, QueryStats, VertexId, VertexMapping};

use super::records;
use crate::error::{Error, Result};

pub fn format_answers(answers: &[Answer]) -> String {
    let mut sorted: Vec<&Answer> = answers.iter().collect();
    sorted.sort_by(|a, b| a.cmp_by_score(b));
    let mut out = String::new();
    for a in sorted {
        write!(out, "a {}", a.gnd).unwrap();
        for (q, v) in a.mapping.iter() {
            write!(out, " {q}:{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn format_stats(s: &QueryStats) -> String {
    let wall_ms = s.wall_time.map_or(0, |d| d.as_millis());
    format!(
        "stats pruning_power={} candidates={} answers={} wall_ms={}\n",
        s.pruning_power, s.candidates_total, s.answers, wall_ms
    )
}

/// `(gnd, mapping)` pairs from `a` lines; other records are skipped.
pub fn parse_answers(text: &str) -> Result<Vec<(f64, VertexMapping)>> {
    let mut out = Vec::new();
    for (line, f) in records(text) {
        if f[0] != "a" {
            continue;
        }
        if f.len() < 2 {
            return Err(Error::parse(line, "answer line without score"));
        }
        let gnd = f[1].parse().map_err(|_| Error::parse(line, "bad score"))?;
        let mut m = VertexMapping::new();
        for pair in &f[2..] {
            let parsed = pair
                .split_once(':')
                .and_then(|(q, v)| Some((q.parse::<VertexId>().ok()?, v.parse::<VertexId>().ok()?)));
            let Some((q, v)) = parsed else {
                return Err(Error::parse(line, format!("bad pair {pair:?}")));
            };
            m.insert(q, v);
        }
        out.push((gnd, m));
    }
    Ok(out)
}
