//! On-disk formats. Text formats share one lexical convention: one record
//! per line, whitespace-separated fields, blank lines and lines starting
//! with `#` ignored.

pub mod answers;
pub mod embeddings;
pub mod graph;
pub mod index;
pub mod trainer;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Non-empty, non-comment lines as (1-based line number, fields).
pub(crate) fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split_whitespace().collect()))
        }
    })
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
