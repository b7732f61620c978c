//! Binary index format.
//!
//! Little-endian throughout:
//!
//! ```text
//! "DFOR" | version u32 | n u64 | m u64 | kmax u32 (0xFFFFFFFF = none)
//! label count u64 | per label: byte length u32, UTF-8 bytes
//! per tree k = 0..=kmax:
//!     node count u32
//!     per node, preorder: coreNum i32 | parent index i32 (-1 at the root)
//!                         | vSet length u32 | ascending vertex ids u32
//! ```
//!
//! The vertex→node maps are rebuilt on load.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::FormatError;
use crate::graph::VertexId;
use crate::index::{DForest, KTree, NodeId};

pub const MAGIC: &[u8; 4] = b"DFOR";
pub const VERSION: u32 = 1;

/// Writes `f`, which must be in canonical form.
pub fn serialize<W: Write>(f: &DForest, sink: W) -> Result<(), FormatError> {
    let mut w = BufWriter::new(sink);
    w.write_all(MAGIC)?;
    put_u32(&mut w, VERSION)?;
    put_u64(&mut w, f.n() as u64)?;
    put_u64(&mut w, f.m)?;
    put_u32(&mut w, f.kmax() as u32)?;
    put_u64(&mut w, f.labels().len() as u64)?;
    for label in f.labels() {
        put_u32(&mut w, label.len() as u32)?;
        w.write_all(label.as_bytes())?;
    }
    for t in &f.trees {
        let order = t.preorder();
        if order.iter().enumerate().any(|(i, x)| x.index() != i) {
            return Err(FormatError::Malformed(format!(
                "tree {} is not canonical; canonicalize before writing",
                t.k
            )));
        }
        put_u32(&mut w, t.len() as u32)?;
        for node in t.nodes() {
            put_i32(&mut w, node.core_num)?;
            put_i32(&mut w, node.parent.map_or(-1, |p| p.0 as i32))?;
            put_u32(&mut w, node.vset.len() as u32)?;
            for &v in &node.vset {
                put_u32(&mut w, v)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn to_bytes(f: &DForest) -> Result<Vec<u8>, FormatError> {
    let mut out = Vec::new();
    serialize(f, &mut out)?;
    Ok(out)
}

pub fn deserialize<R: Read>(source: R) -> Result<DForest, FormatError> {
    let mut r = BufReader::new(source);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(FormatError::BadMagic);
    }
    let version = get_u32(&mut r)?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let n = get_u64(&mut r)?;
    let m = get_u64(&mut r)?;
    let kmax = get_u32(&mut r)? as i32;
    if kmax < -1 {
        return Err(FormatError::Malformed(format!("kmax {kmax}")));
    }
    let count = get_u64(&mut r)?;
    if count != n {
        return Err(FormatError::Malformed(format!("{count} labels for {n} vertices")));
    }
    // grow incrementally so a corrupt count fails as truncation, not as an allocation
    let mut labels = Vec::new();
    for _ in 0..count {
        let len = get_u32(&mut r)? as usize;
        let mut bytes = Vec::new();
        (&mut r).take(len as u64).read_to_end(&mut bytes)?;
        if bytes.len() != len {
            return Err(FormatError::Truncated);
        }
        let label = String::from_utf8(bytes)
            .map_err(|_| FormatError::Malformed("label is not UTF-8".into()))?;
        labels.push(label);
    }
    let n = labels.len();
    let mut trees = Vec::new();
    for k in 0..(kmax + 1) as usize {
        trees.push(read_tree(&mut r, k, n)?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(FormatError::Malformed("trailing bytes after last tree".into()));
    }
    let f = DForest::new(trees, labels, m, "deserialized");
    f.validate_structure().map_err(FormatError::Malformed)?;
    Ok(f)
}

pub fn from_bytes(bytes: &[u8]) -> Result<DForest, FormatError> {
    deserialize(bytes)
}

fn read_tree<R: Read>(r: &mut R, k: usize, n: usize) -> Result<KTree, FormatError> {
    let count = get_u32(r)? as usize;
    if count == 0 {
        return Err(FormatError::Malformed(format!("tree {k} has no root")));
    }
    let mut tree = KTree::new(k, n);
    let mut seen = vec![false; n];
    for i in 0..count {
        let core_num = get_i32(r)?;
        let parent = get_i32(r)?;
        let len = get_u32(r)? as usize;
        let mut vset = Vec::new();
        for _ in 0..len {
            let v = get_u32(r)?;
            if v as usize >= n {
                return Err(FormatError::Malformed(format!("tree {k}: vertex {v} out of range")));
            }
            if vset.last().is_some_and(|&last: &VertexId| last >= v) {
                return Err(FormatError::Malformed(format!("tree {k}: vSet not ascending")));
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(FormatError::VertexOverlap { k, vertex: v });
            }
            vset.push(v);
        }
        if i == 0 {
            if parent != -1 || core_num != -1 || !vset.is_empty() {
                return Err(FormatError::Malformed(format!("tree {k}: malformed root")));
            }
            continue;
        }
        if parent < 0 || parent as usize >= i {
            return Err(FormatError::Malformed(format!(
                "tree {k}: node {i} has parent {parent}, not an earlier node"
            )));
        }
        let id = tree.add_node(core_num, vset);
        tree.link(NodeId(parent as u32), id);
    }
    if tree.preorder().iter().enumerate().any(|(i, x)| x.index() != i) {
        return Err(FormatError::Malformed(format!("tree {k}: nodes not in preorder")));
    }
    Ok(tree)
}

pub fn write_index_file<P: AsRef<Path>>(f: &DForest, path: P) -> Result<(), FormatError> {
    serialize(f, File::create(path)?)
}

pub fn read_index_file<P: AsRef<Path>>(path: P) -> Result<DForest, FormatError> {
    deserialize(File::open(path)?)
}

fn put_u32<W: Write>(w: &mut W, x: u32) -> io::Result<()> {
    w.write_all(&x.to_le_bytes())
}

fn put_i32<W: Write>(w: &mut W, x: i32) -> io::Result<()> {
    w.write_all(&x.to_le_bytes())
}

fn put_u64<W: Write>(w: &mut W, x: u64) -> io::Result<()> {
    w.write_all(&x.to_le_bytes())
}

fn get_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_i32<R: Read>(r: &mut R) -> io::Result<i32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(i32::from_le_bytes(b))
}

fn get_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}
