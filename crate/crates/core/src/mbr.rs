//! Keyword embeddings and minimum bounding rectangles (MBRs) in embedding space.
//!
//! If `A ⊆ B` then the MBR of `A`'s embedding points lies inside the MBR of
//! `B`'s, for any embedding table. Keyword pruning relies on nothing else, so
//! it stays sound whether the table is trained or a hashed fallback.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // Float provides ln() without std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, Hasher};
use crate::graph::is_valid_keyword;

/// Additive guard inside `ln(side + ε)` so zero-width sides stay finite.
pub const LOG_AREA_EPSILON: f64 = 1e-6;

/// Keyword to `dim`-dimensional vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension { min: 1, got: 0 });
        }
        Ok(EmbeddingTable {
            dim,
            vectors: BTreeMap::new(),
        })
    }

    pub fn insert(&mut self, keyword: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let keyword = keyword.into();
        if !is_valid_keyword(&keyword) {
            return Err(Error::InvalidKeyword(keyword));
        }
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        if vector.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteEmbedding(keyword));
        }
        if self.vectors.contains_key(&keyword) {
            return Err(Error::DuplicateKeyword(keyword));
        }
        self.vectors.insert(keyword, vector);
        Ok(())
    }

    /// Deterministic table: each keyword's vector is drawn uniformly from
    /// `[-1, 1)^dim` by a generator seeded with a hash of `(seed, keyword)`.
    pub fn fallback<'a, I>(keywords: I, dim: usize, seed: u64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        if dim < 2 {
            return Err(Error::InvalidDimension { min: 2, got: dim });
        }
        let mut table = EmbeddingTable::new(dim)?;
        for k in keywords {
            if !table.contains(k) {
                table.insert(k, fallback_vector(k, dim, seed))?;
            }
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, keyword: &str) -> bool {
        self.vectors.contains_key(keyword)
    }

    pub fn get(&self, keyword: &str) -> Result<&[f64]> {
        self.vectors
            .get(keyword)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownKeyword(keyword.into()))
    }

    /// Rows sorted by keyword.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let mut h = Hasher::new("s3gnd-embeddings");
        h.u64(self.dim as u64);
        h.u64(self.vectors.len() as u64);
        for (k, v) in &self.vectors {
            h.str(k);
            for &c in v {
                h.f64(c);
            }
        }
        h.finish()
    }
}

/// The fallback vector of one keyword; identical across runs and platforms.
pub fn fallback_vector(keyword: &str, dim: usize, seed: u64) -> Vec<f64> {
    let mut h = Hasher::new("s3gnd-fallback");
    h.u64(seed);
    h.str(keyword);
    let mut rng = ChaCha8Rng::from_seed(h.finish().0);
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Axis-aligned box, or the bounding box of the empty keyword set.
///
/// [`Mbr::EmptySet`] is contained in every MBR and contains only itself, which
/// mirrors `∅ ⊆ K` for every keyword set `K`.
#[derive(Debug, Clone, PartialEq)]
pub enum Mbr {
    EmptySet,
    Bounds { lo: Vec<f64>, hi: Vec<f64> },
}

impl Mbr {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::InvalidDimension { min: 1, got: 0 });
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l <= h)) {
            return Err(Error::InvalidConfig("MBR lower bound exceeds upper bound".into()));
        }
        Ok(Mbr::Bounds { lo, hi })
    }

    pub fn point(p: &[f64]) -> Self {
        Mbr::Bounds {
            lo: p.to_vec(),
            hi: p.to_vec(),
        }
    }

    /// Component-wise min/max over the keywords' vectors.
    pub fn of_keyword_set<'a, I>(keywords: I, table: &EmbeddingTable) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut mbr = Mbr::EmptySet;
        for k in keywords {
            let p = table.get(k)?;
            match &mut mbr {
                Mbr::EmptySet => mbr = Mbr::point(p),
                Mbr::Bounds { lo, hi } => {
                    for i in 0..p.len() {
                        lo[i] = lo[i].min(p[i]);
                        hi[i] = hi[i].max(p[i]);
                    }
                }
            }
        }
        Ok(mbr)
    }

    pub fn is_empty_set(&self) -> bool {
        matches!(self, Mbr::EmptySet)
    }

    /// `None` for the sentinel.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Mbr::EmptySet => None,
            Mbr::Bounds { lo, .. } => Some(lo.len()),
        }
    }

    fn same_dim(a: &[f64], b: &[f64]) -> Result<()> {
        if a.len() == b.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            })
        }
    }

    /// Exact containment test `inner ⊆ self`.
    pub fn contains(&self, inner: &Mbr) -> Result<bool> {
        match (self, inner) {
            (_, Mbr::EmptySet) => Ok(true),
            (Mbr::EmptySet, _) => Ok(false),
            (Mbr::Bounds { lo, hi }, Mbr::Bounds { lo: ilo, hi: ihi }) => {
                Self::same_dim(lo, ilo)?;
                Ok((0..lo.len()).all(|i| lo[i] <= ilo[i] && ihi[i] <= hi[i]))
            }
        }
    }

    pub fn intersect(&self, other: &Mbr) -> Result<Option<Mbr>> {
        let (Mbr::Bounds { lo, hi }, Mbr::Bounds { lo: olo, hi: ohi }) = (self, other) else {
            return Ok(None);
        };
        Self::same_dim(lo, olo)?;
        let lo: Vec<f64> = lo.iter().zip(olo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = hi.iter().zip(ohi).map(|(a, b)| a.min(*b)).collect();
        if lo.iter().zip(&hi).all(|(l, h)| l <= h) {
            Ok(Some(Mbr::Bounds { lo, hi }))
        } else {
            Ok(None)
        }
    }

    pub fn union(&self, other: &Mbr) -> Result<Mbr> {
        match (self, other) {
            (Mbr::EmptySet, m) | (m, Mbr::EmptySet) => Ok(m.clone()),
            (Mbr::Bounds { lo, hi }, Mbr::Bounds { lo: olo, hi: ohi }) => {
                Self::same_dim(lo, olo)?;
                Ok(Mbr::Bounds {
                    lo: lo.iter().zip(olo).map(|(a, b)| a.min(*b)).collect(),
                    hi: hi.iter().zip(ohi).map(|(a, b)| a.max(*b)).collect(),
                })
            }
        }
    }

    /// Grows `self` in place to cover `other`.
    pub fn expand(&mut self, other: &Mbr) -> Result<()> {
        match (&mut *self, other) {
            (_, Mbr::EmptySet) => Ok(()),
            (Mbr::EmptySet, m) => {
                *self = m.clone();
                Ok(())
            }
            (Mbr::Bounds { lo, hi }, Mbr::Bounds { lo: olo, hi: ohi }) => {
                Self::same_dim(lo, olo)?;
                for i in 0..lo.len() {
                    lo[i] = lo[i].min(olo[i]);
                    hi[i] = hi[i].max(ohi[i]);
                }
                Ok(())
            }
        }
    }

    /// `Σ_i ln(hi_i - lo_i + ε)`.
    pub fn log_area(&self) -> Result<f64> {
        match self {
            Mbr::EmptySet => Err(Error::SentinelArea),
            Mbr::Bounds { lo, hi } => Ok(lo
                .iter()
                .zip(hi)
                .map(|(l, h)| (h - l + LOG_AREA_EPSILON).ln())
                .sum()),
        }
    }

    /// Growth of `self`'s log-area when enlarged to cover `candidate`, at least 0.
    /// An empty-set center is treated as having the floor area `d·ln ε`.
    pub fn area_expansion(&self, candidate: &Mbr) -> Result<f64> {
        match (self, candidate) {
            (_, Mbr::EmptySet) => Ok(0.0),
            (Mbr::EmptySet, c) => {
                let d = c.dim().unwrap() as f64;
                Ok((c.log_area()? - d * LOG_AREA_EPSILON.ln()).max(0.0))
            }
            (Mbr::Bounds { lo, hi }, Mbr::Bounds { lo: clo, hi: chi }) => {
                Self::same_dim(lo, clo)?;
                let mut growth = 0.0;
                for i in 0..lo.len() {
                    let (l, h) = (lo[i].min(clo[i]), hi[i].max(chi[i]));
                    if l < lo[i] || h > hi[i] {
                        growth += ((h - l + LOG_AREA_EPSILON) / (hi[i] - lo[i] + LOG_AREA_EPSILON)).ln();
                    }
                }
                Ok(growth.max(0.0))
            }
        }
    }
}
