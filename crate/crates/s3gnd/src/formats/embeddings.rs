//! Keyword embedding file: header `emb <d>`, then `<keyword> <c1> ... <cd>`.
//! Values are written with 17 significant digits, enough for any f64 to
//! survive a decimal round trip unchanged.

use std::fmt::Write as _;
use std::path::Path;

use s3gnd_core::EmbeddingTable;

use super::{read_text, records, write_text};
use crate::error::{AtLine, Error, Result};

pub fn parse_embeddings(text: &str) -> Result<EmbeddingTable> {
    let mut table: Option<EmbeddingTable> = None;
    for (line, fields) in records(text) {
        let Some(t) = table.as_mut() else {
            if fields.len() != 2 || fields[0] != "emb" {
                return Err(Error::parse(line, "expected header `emb <d>`"));
            }
            let d = fields[1]
                .parse()
                .map_err(|_| Error::parse(line, format!("bad dimension {:?}", fields[1])))?;
            table = Some(EmbeddingTable::new(d).at_line(line)?);
            continue;
        };
        let values = fields[1..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(line, format!("bad value: {e}")))?;
        t.insert(fields[0], values).at_line(line)?;
    }
    table.ok_or_else(|| Error::parse(0, "missing header `emb <d>`"))
}

pub fn format_embeddings(t: &EmbeddingTable) -> String {
    let mut out = String::new();
    writeln!(out, "emb {}", t.dim()).unwrap();
    for (k, v) in t.iter() {
        out.push_str(k);
        for x in v {
            write!(out, " {x:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    parse_embeddings(&read_text(path.as_ref())?)
}

pub fn write_embeddings(path: impl AsRef<Path>, t: &EmbeddingTable) -> Result<()> {
    write_text(path.as_ref(), &format_embeddings(t))
}
