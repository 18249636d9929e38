//! Binary index container. All integers and floats are little-endian; floats
//! are stored as raw IEEE-754 bits, so a round trip is bit-exact.
//!
//! ```text
//! magic    8 bytes  "S3GNDIDX"
//! version  u32      FORMAT_VERSION
//! fanout   u32
//! dim      u32
//! graph    32 bytes graph fingerprint
//! emb      32 bytes embedding table fingerprint
//! root     node
//! trailer  4 bytes  "END!"
//!
//! node     := tag u8 ('L' | 'I'), count u32, count entries
//! leaf     := vertex u64, mbr, wlist
//! internal := mbr, wlist, node          (child follows its entry: preorder)
//! mbr      := 0u8                       (empty keyword set)
//!           | 1u8, dim × f64 lo, dim × f64 hi
//! wlist    := len u32, len × f64        (non-ascending)
//! ```

use std::fs;
use std::path::Path;

use s3gnd_core::index::{ChildEntry, LeafEntry};
use s3gnd_core::{Fingerprint, IndexNode, Mbr, SortedWeightList, TreeIndex, VertexAux};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"S3GNDIDX";
const TRAILER: &[u8; 4] = b"END!";

pub fn encode_index(ix: &TreeIndex) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(ix.fanout as u32).to_le_bytes());
    out.extend_from_slice(&(ix.dim as u32).to_le_bytes());
    out.extend_from_slice(&ix.graph_fingerprint.0);
    out.extend_from_slice(&ix.embedding_fingerprint.0);
    encode_node(&mut out, &ix.root);
    out.extend_from_slice(TRAILER);
    out
}

fn encode_node(out: &mut Vec<u8>, node: &IndexNode) {
    match node {
        IndexNode::Leaf(entries) => {
            out.push(b'L');
            out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
            for e in entries {
                out.extend_from_slice(&e.vertex.to_le_bytes());
                encode_mbr(out, &e.aux.mbr);
                encode_wlist(out, &e.aux.wlist);
            }
        }
        IndexNode::Internal(entries) => {
            out.push(b'I');
            out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
            for e in entries {
                encode_mbr(out, &e.mbr);
                encode_wlist(out, &e.wlist);
                encode_node(out, &e.child);
            }
        }
    }
}

fn encode_mbr(out: &mut Vec<u8>, m: &Mbr) {
    match m {
        Mbr::EmptySet => out.push(0),
        Mbr::Bounds { lo, hi } => {
            out.push(1);
            for x in lo.iter().chain(hi) {
                out.extend_from_slice(&x.to_bits().to_le_bytes());
            }
        }
    }
}

fn encode_wlist(out: &mut Vec<u8>, l: &SortedWeightList) {
    out.extend_from_slice(&(l.len() as u32).to_le_bytes());
    for x in l.as_slice() {
        out.extend_from_slice(&x.to_bits().to_le_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(Error::Corrupt(format!("truncated at byte {}", self.pos)));
        };
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn fingerprint(&mut self, what: &str) -> Result<Fingerprint> {
        let fp = Fingerprint(self.take(32)?.try_into().unwrap());
        if fp.0 == [0; 32] {
            return Err(Error::Corrupt(format!("{what} fingerprint absent")));
        }
        Ok(fp)
    }

    /// A count that cannot exceed the bytes left, so corrupt lengths fail
    /// before allocating.
    fn count(&mut self, unit: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if n.saturating_mul(unit) > self.bytes.len() - self.pos {
            return Err(Error::Corrupt(format!("length {n} at byte {} exceeds file size", self.pos - 4)));
        }
        Ok(n)
    }

    fn mbr(&mut self) -> Result<Mbr> {
        match self.u8()? {
            0 => Ok(Mbr::EmptySet),
            1 => {
                let mut lo = Vec::with_capacity(self.dim);
                let mut hi = Vec::with_capacity(self.dim);
                for _ in 0..self.dim {
                    lo.push(self.f64()?);
                }
                for _ in 0..self.dim {
                    hi.push(self.f64()?);
                }
                Mbr::new(lo, hi).map_err(|e| Error::Corrupt(e.to_string()))
            }
            t => Err(Error::Corrupt(format!("bad MBR tag {t} at byte {}", self.pos - 1))),
        }
    }

    fn wlist(&mut self) -> Result<SortedWeightList> {
        let n = self.count(8)?;
        let ws = (0..n).map(|_| self.f64()).collect::<Result<Vec<_>>>()?;
        if ws.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Corrupt("weight list out of order".into()));
        }
        SortedWeightList::new(ws).map_err(|e| Error::Corrupt(e.to_string()))
    }

    fn node(&mut self, depth: usize) -> Result<IndexNode> {
        if depth > 64 {
            return Err(Error::Corrupt("tree deeper than 64 levels".into()));
        }
        let tag = self.u8()?;
        let n = self.count(1)?;
        match tag {
            b'L' => {
                let mut entries = Vec::with_capacity(n);
                for _ in 0..n {
                    let vertex = self.u64()?;
                    let mbr = self.mbr()?;
                    let wlist = self.wlist()?;
                    entries.push(LeafEntry { vertex, aux: VertexAux { mbr, wlist } });
                }
                Ok(IndexNode::Leaf(entries))
            }
            b'I' => {
                let mut entries = Vec::with_capacity(n);
                for _ in 0..n {
                    let mbr = self.mbr()?;
                    let wlist = self.wlist()?;
                    let child = self.node(depth + 1)?;
                    entries.push(ChildEntry { mbr, wlist, child });
                }
                Ok(IndexNode::Internal(entries))
            }
            t => Err(Error::Corrupt(format!("bad node tag {t} at byte {}", self.pos - 5))),
        }
    }
}

pub fn decode_index(bytes: &[u8]) -> Result<TreeIndex> {
    let mut r = Reader { bytes, pos: 0, dim: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Corrupt("not an index file".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Version { expected: FORMAT_VERSION, found: version });
    }
    let fanout = r.u32()? as usize;
    r.dim = r.u32()? as usize;
    let graph_fingerprint = r.fingerprint("graph")?;
    let embedding_fingerprint = r.fingerprint("embedding")?;
    let root = r.node(0)?;
    if r.take(4)? != TRAILER {
        return Err(Error::Corrupt("missing trailer".into()));
    }
    if r.pos != bytes.len() {
        return Err(Error::Corrupt(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    if fanout < 2 || root.len() > fanout {
        return Err(Error::Corrupt(format!("fanout {fanout} inconsistent with tree")));
    }
    Ok(TreeIndex { root, fanout, dim: r.dim, embedding_fingerprint, graph_fingerprint })
}

pub fn save_index(path: impl AsRef<Path>, ix: &TreeIndex) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_index(ix)).map_err(|e| Error::io(path, e))
}

pub fn load_index(path: impl AsRef<Path>) -> Result<TreeIndex> {
    let path = path.as_ref();
    decode_index(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use s3gnd_core::{BuildConfig, EmbeddingTable, Graph};

    fn sample() -> (Graph, EmbeddingTable, TreeIndex) {
        let mut b = Graph::builder();
        for v in 0..40u64 {
            let kws: Vec<String> = if v % 7 == 0 { vec![] } else { vec![format!("k{}", v % 5), format!("k{}", v % 3)] };
            b.add_vertex(v, kws).unwrap();
        }
        for v in 0..39u64 {
            b.add_edge(v, v + 1, 1.0 + (v % 4) as f64 / 3.0).unwrap();
        }
        let g = b.build().unwrap();
        let t = EmbeddingTable::fallback(g.keyword_domain(), 3, 1).unwrap();
        let ix = TreeIndex::build(&g, &t, &BuildConfig { fanout: 4, ..Default::default() }).unwrap();
        (g, t, ix)
    }

    #[test]
    fn round_trip_is_exact() {
        let (g, t, ix) = sample();
        let bytes = encode_index(&ix);
        let back = decode_index(&bytes).unwrap();
        assert_eq!(back, ix);
        assert_eq!(encode_index(&back), bytes);
        back.verify(&g, &t).unwrap();
    }

    #[test]
    fn detects_damage() {
        let (_, _, ix) = sample();
        let bytes = encode_index(&ix);
        for cut in [0, 7, 20, 60, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(decode_index(&bytes[..cut]), Err(Error::Corrupt(_))), "cut {cut}");
        }
        let mut v2 = bytes.clone();
        v2[8] = 2;
        assert!(matches!(decode_index(&v2), Err(Error::Version { expected: 1, found: 2 })));
        let mut nofp = bytes.clone();
        nofp[20..52].fill(0);
        assert!(matches!(decode_index(&nofp), Err(Error::Corrupt(_))));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_index(&extra).is_err());
    }
}
