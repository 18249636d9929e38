//! Trainer input file: the keyword hypergraph plus sampled hyperedge pairs.
//!
//! ```text
//! H <|V(H)|> <|E(H)|> <d_target>
//! k <index> <token>
//! he <index> <weight> <kidx1>,<kidx2>,...
//! p1 <eidx_a> <eidx_b>        (containment, subset first)
//! p2 <eidx_a> <eidx_b>        (intersection)
//! p3 <eidx_a> <eidx_b>        (disjoint)
//! ```
//!
//! The sampling seed travels in a `# seed <n>` comment so that readers which
//! ignore comments see only the records above.

use std::fmt::Write as _;
use std::path::Path;

use s3gnd_core::hypergraph::{Hyperedge, PairDataset};
use s3gnd_core::KeywordHypergraph;

use super::{read_text, records, write_text};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainerInput {
    pub hypergraph: KeywordHypergraph,
    pub pairs: PairDataset,
    pub dim: usize,
}

pub fn format_trainer_input(t: &TrainerInput) -> String {
    let h = &t.hypergraph;
    let mut out = String::new();
    writeln!(out, "# seed {}", t.pairs.seed).unwrap();
    writeln!(out, "H {} {} {}", h.keywords().len(), h.hyperedges().len(), t.dim).unwrap();
    for (i, k) in h.keywords().iter().enumerate() {
        writeln!(out, "k {i} {k}").unwrap();
    }
    for (i, e) in h.hyperedges().iter().enumerate() {
        let list: Vec<String> = e.keywords.iter().map(usize::to_string).collect();
        writeln!(out, "he {i} {} {}", e.weight, list.join(",")).unwrap();
    }
    for (tag, pairs) in [("p1", &t.pairs.containment), ("p2", &t.pairs.intersection), ("p3", &t.pairs.disjoint)] {
        for (a, b) in pairs {
            writeln!(out, "{tag} {a} {b}").unwrap();
        }
    }
    out
}

pub fn parse_trainer_input(text: &str) -> Result<TrainerInput> {
    let mut seed = 0;
    for l in text.lines() {
        if let Some(s) = l.trim().strip_prefix("# seed ") {
            seed = s.trim().parse().unwrap_or(0);
            break;
        }
    }
    let mut header: Option<(usize, [usize; 3])> = None;
    let mut keywords = Vec::new();
    let mut hyperedges = Vec::new();
    let mut pairs = PairDataset { seed, ..Default::default() };
    for (line, f) in records(text) {
        let num = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::parse(line, format!("bad number {s:?}")))
        };
        let arity = |n: usize| -> Result<()> {
            if f.len() == n {
                Ok(())
            } else {
                Err(Error::parse(line, format!("{:?} record needs {} fields", f[0], n - 1)))
            }
        };
        if header.is_none() {
            if f[0] != "H" {
                return Err(Error::parse(line, "expected header `H <|V|> <|E|> <d>`"));
            }
            arity(4)?;
            header = Some((line, [num(f[1])?, num(f[2])?, num(f[3])?]));
            continue;
        }
        match f[0] {
            "k" => {
                arity(3)?;
                if num(f[1])? != keywords.len() {
                    return Err(Error::parse(line, "keyword indices must be consecutive from 0"));
                }
                keywords.push(f[2].to_string());
            }
            "he" => {
                arity(4)?;
                if num(f[1])? != hyperedges.len() {
                    return Err(Error::parse(line, "hyperedge indices must be consecutive from 0"));
                }
                let weight = num(f[2])? as u64;
                let keywords = f[3].split(',').map(num).collect::<Result<Vec<_>>>()?;
                hyperedges.push(Hyperedge { keywords, weight });
            }
            tag @ ("p1" | "p2" | "p3") => {
                arity(3)?;
                let pair = (num(f[1])?, num(f[2])?);
                if pair.0.max(pair.1) >= hyperedges.len() {
                    return Err(Error::parse(line, "pair references an undeclared hyperedge"));
                }
                match tag {
                    "p1" => pairs.containment.push(pair),
                    "p2" => pairs.intersection.push(pair),
                    _ => pairs.disjoint.push(pair),
                }
            }
            "H" => return Err(Error::parse(line, "duplicate header")),
            tag => return Err(Error::parse(line, format!("unknown record type {tag:?}"))),
        }
    }
    let Some((hline, [nk, ne, dim])) = header else {
        return Err(Error::parse(0, "missing header"));
    };
    if nk != keywords.len() || ne != hyperedges.len() {
        return Err(Error::parse(
            hline,
            format!("header declares {nk} keywords and {ne} hyperedges, file has {} and {}", keywords.len(), hyperedges.len()),
        ));
    }
    let hypergraph = KeywordHypergraph::from_parts(keywords, hyperedges)?;
    Ok(TrainerInput { hypergraph, pairs, dim })
}

pub fn read_trainer_input(path: impl AsRef<Path>) -> Result<TrainerInput> {
    parse_trainer_input(&read_text(path.as_ref())?)
}

pub fn write_trainer_input(path: impl AsRef<Path>, t: &TrainerInput) -> Result<()> {
    write_text(path.as_ref(), &format_trainer_input(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use s3gnd_core::hypergraph::sample_pairs;
    use s3gnd_core::Graph;

    fn sample() -> TrainerInput {
        let mut b = Graph::builder();
        for (v, kws) in [(1, "k1,k2,k3,k4"), (2, "k1,k2"), (3, "k2,k3,k4"), (4, "k3"), (5, "k2,k3,k4")] {
            b.add_vertex(v, kws.split(',')).unwrap();
        }
        let g = b.build().unwrap();
        let h = KeywordHypergraph::build(&g);
        let (pairs, _) = sample_pairs(&h, 2, 9).unwrap();
        TrainerInput { hypergraph: h, pairs, dim: 16 }
    }

    #[test]
    fn round_trip() {
        let t = sample();
        let text = format_trainer_input(&t);
        assert!(text.contains("H 4 4 16\n"));
        assert_eq!(parse_trainer_input(&text).unwrap(), t);
        assert_eq!(format_trainer_input(&parse_trainer_input(&text).unwrap()), text);
    }

    #[test]
    fn rejects_malformed() {
        let good = format_trainer_input(&sample());
        for bad in [
            good.replace("H 4 4 16", "H 5 4 16"),
            good.replace("k 1 ", "k 3 "),
            good.replace("he 0 ", "he 0 x "),
            good.replace("H 4 4 16", "X 4 4 16"),
            format!("{good}p2 0 99\n"),
            format!("{good}q 1 2\n"),
        ] {
            assert!(parse_trainer_input(&bad).is_err(), "{bad}");
        }
    }
}
