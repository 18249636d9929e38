//! Content fingerprints tying an index to the graph and embedding table it
//! was built from.

use core::fmt;
use core::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::Error;

/// SHA-256 over a canonical byte encoding of a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub [u8; 32]);

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl FromStr for Fingerprint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidConfig(alloc::format!("malformed fingerprint {s:?}"));
        if s.len() != 64 || !s.is_ascii() {
            return Err(bad());
        }
        let mut out = [0u8; 32];
        for (i, byte) in out.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).map_err(|_| bad())?;
        }
        Ok(Fingerprint(out))
    }
}

/// Streams length-prefixed fields into a hasher.
pub(crate) struct Hasher(Sha256);

impl Hasher {
    pub(crate) fn new(domain: &str) -> Self {
        let mut h = Hasher(Sha256::new());
        h.str(domain);
        h
    }

    pub(crate) fn u64(&mut self, v: u64) {
        self.0.update(v.to_le_bytes());
    }

    pub(crate) fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    pub(crate) fn str(&mut self, s: &str) {
        self.u64(s.len() as u64);
        self.0.update(s.as_bytes());
    }

    pub(crate) fn finish(self) -> Fingerprint {
        Fingerprint(self.0.finalize().into())
    }
}

impl crate::graph::Graph {
    pub fn fingerprint(&self) -> Fingerprint {
        let mut h = Hasher::new("s3gnd-graph");
        h.u64(self.sigma() as u64);
        h.u64(self.vertex_count() as u64);
        for v in self.vertices() {
            h.u64(v);
            let kws = self.keywords(v).unwrap();
            h.u64(kws.len() as u64);
            for k in kws {
                h.str(k);
            }
            let nbrs = self.neighbors(v).unwrap();
            h.u64(nbrs.len() as u64);
            for (&u, &w) in nbrs {
                h.u64(u);
                h.f64(w);
            }
        }
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn hex_round_trip() {
        let fp = Hasher::new("x").finish();
        assert_eq!(fp.to_string().parse::<Fingerprint>().unwrap(), fp);
        assert!("zz".parse::<Fingerprint>().is_err());
    }

    #[test]
    fn graph_fingerprint_sees_weights() {
        use crate::graph::tests::graph;
        let a = graph(&[(1, &["a"]), (2, &[])], &[(1, 2, 1.0)]);
        let b = graph(&[(1, &["a"]), (2, &[])], &[(1, 2, 2.0)]);
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
