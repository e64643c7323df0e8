//! Binary index container.
//!
//! Layout: the magic `NETCLUST`, a `u32` format version, then tagged
//! sections `(tag: [u8; 4], length: u64, payload)`. All integers and floats
//! are little-endian. Sections, in order:
//!
//! - `HEAD`: `m: u64`, `c: u32`, `i_top: i32`, `scale: f64`
//! - `PNTS`: backing kind `u8` (0 coords, 1 matrix); coords add `dim: u64`,
//!   `norm: u8` and `m * dim` values, a matrix adds `m * m` values
//! - `NETS`: highest level of every point, `m` values of `i32`
//! - `TREE`: node count, then per node `(point: u32, hi: i32, lo: i32)`, the
//!   parent array, child offsets and child ids, all `u32`
//! - `LIST`: the c-list store's per-point base offsets, range offsets and
//!   payload, each as a `u64` count followed by `u32` values
//!
//! Navigation tables, subtree ranges and leaf lookups are rebuilt on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::hierarchy::{CListStore, HierarchyTree, NetHierarchy, NetLevels, TreeNode};
use crate::index::NetIndex;
use crate::metric::{Backing, Norm, PointId, PointSet};

const MAGIC: &[u8; 8] = b"NETCLUST";
const VERSION: u32 = 1;
const NO_PARENT: u32 = u32::MAX;

#[derive(Default)]
struct Section(Vec<u8>);

impl Section {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn i32(&mut self, v: i32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32s(&mut self, v: &[u32]) {
        self.u64(v.len() as u64);
        for &x in v {
            self.u32(x);
        }
    }
}

fn put(out: &mut Vec<u8>, tag: &[u8; 4], s: Section) {
    out.extend_from_slice(tag);
    out.extend_from_slice(&(s.0.len() as u64).to_le_bytes());
    out.extend_from_slice(&s.0);
}

/// Serializes an index to bytes.
pub fn to_bytes(index: &NetIndex) -> Vec<u8> {
    let ps = index.points();
    let h = index.hierarchy();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());

    let mut s = Section::default();
    s.u64(ps.len() as u64);
    s.u32(h.lists.c);
    s.i32(h.nets.i_top);
    s.f64(ps.scale());
    put(&mut out, b"HEAD", s);

    let mut s = Section::default();
    match ps.backing() {
        Backing::Coords { dim, norm, coords } => {
            s.u8(0);
            s.u64(*dim as u64);
            s.u8(norm.to_code());
            coords.iter().for_each(|&x| s.f64(x));
        }
        Backing::Matrix { dists } => {
            s.u8(1);
            dists.iter().for_each(|&x| s.f64(x));
        }
    }
    put(&mut out, b"PNTS", s);

    let mut s = Section::default();
    h.nets.top.iter().for_each(|&t| s.i32(t));
    put(&mut out, b"NETS", s);

    let t = &h.tree;
    let mut s = Section::default();
    s.u64(t.nodes.len() as u64);
    for node in &t.nodes {
        s.u32(node.point.0);
        s.i32(node.hi);
        s.i32(node.lo);
    }
    t.parent.iter().for_each(|&p| s.u32(p));
    s.u32s(&t.child_start);
    s.u32s(&t.children);
    put(&mut out, b"TREE", s);

    let l = &h.lists;
    let mut s = Section::default();
    s.u32s(&l.base);
    s.u32s(&l.ranges);
    s.u32s(&l.payload);
    put(&mut out, b"LIST", s);
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

struct Cursor<'a> {
    buf: &'a [u8],
    what: &'static str,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(bad(format!("section {} is truncated", self.what)));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn len(&mut self, unit: usize) -> Result<usize> {
        let n = self.u64()?;
        if n > (self.buf.len() / unit) as u64 {
            return Err(bad(format!(
                "section {} declares more data than it holds",
                self.what
            )));
        }
        Ok(n as usize)
    }
    fn u32s(&mut self) -> Result<Vec<u32>> {
        let n = self.len(4)?;
        (0..n).map(|_| self.u32()).collect()
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        if n > self.buf.len() / 8 {
            return Err(bad(format!("section {} is truncated", self.what)));
        }
        (0..n).map(|_| self.f64()).collect()
    }
    fn done(&self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(bad(format!("section {} has trailing bytes", self.what)))
        }
    }
}

fn section<'a>(cur: &mut Cursor<'a>, tag: &[u8; 4], what: &'static str) -> Result<Cursor<'a>> {
    let got = cur.take(4)?;
    if got != tag {
        return Err(bad(format!("expected section {what}")));
    }
    let n = cur.u64()?;
    if n > cur.buf.len() as u64 {
        return Err(bad(format!("section {what} is truncated")));
    }
    Ok(Cursor {
        buf: cur.take(n as usize)?,
        what,
    })
}

/// Deserializes an index written by [`to_bytes`], checking structural
/// consistency.
pub fn from_bytes(bytes: &[u8]) -> Result<NetIndex> {
    let mut cur = Cursor {
        buf: bytes,
        what: "header",
    };
    if cur.take(8).ok() != Some(&MAGIC[..]) {
        return Err(bad("not an index file (bad magic)"));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(bad(format!("unsupported format version {version}")));
    }

    let mut s = section(&mut cur, b"HEAD", "HEAD")?;
    let m = s.u64()? as usize;
    let c = s.u32()?;
    let i_top = s.i32()?;
    let scale = s.f64()?;
    s.done()?;
    if m == 0
        || m > u32::MAX as usize
        || !(0..=2048).contains(&i_top)
        || scale.is_nan()
        || scale <= 0.0
    {
        return Err(bad("header values out of range"));
    }

    let mut s = section(&mut cur, b"PNTS", "PNTS")?;
    let backing = match s.u8()? {
        0 => {
            let dim = s.u64()? as usize;
            let norm = Norm::from_code(s.u8()?).ok_or_else(|| bad("unknown norm code"))?;
            if dim == 0 || dim > s.buf.len() {
                return Err(bad("bad coordinate dimension"));
            }
            let coords = s.f64s(m.checked_mul(dim).ok_or_else(|| bad("size overflow"))?)?;
            Backing::Coords { dim, norm, coords }
        }
        1 => Backing::Matrix {
            dists: s.f64s(m.checked_mul(m).ok_or_else(|| bad("size overflow"))?)?,
        },
        k => return Err(bad(format!("unknown backing kind {k}"))),
    };
    s.done()?;
    let points = PointSet::from_parts(m, backing, scale);

    let mut s = section(&mut cur, b"NETS", "NETS")?;
    let top: Vec<i32> = (0..m).map(|_| s.i32()).collect::<Result<_>>()?;
    s.done()?;
    if top.iter().any(|&t| t < 0 || t > i_top) || top[0] != i_top {
        return Err(bad("net levels out of range"));
    }

    let mut s = section(&mut cur, b"TREE", "TREE")?;
    let n = s.len(12)?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let point = s.u32()?;
        let hi = s.i32()?;
        let lo = s.i32()?;
        if point as usize >= m || lo < 0 || lo > hi || hi > top[point as usize] {
            return Err(bad("tree node out of range"));
        }
        nodes.push(TreeNode {
            point: PointId(point),
            hi,
            lo,
        });
    }
    let parent: Vec<u32> = (0..n).map(|_| s.u32()).collect::<Result<_>>()?;
    let child_start = s.u32s()?;
    let children = s.u32s()?;
    s.done()?;
    check_tree(m, &nodes, &parent, &child_start, &children)?;
    let tree = HierarchyTree::finish(nodes, parent, child_start, children, m);

    let mut s = section(&mut cur, b"LIST", "LIST")?;
    let base = s.u32s()?;
    let ranges = s.u32s()?;
    let payload = s.u32s()?;
    s.done()?;
    check_lists(m, &top, &base, &ranges, &payload)?;
    cur.done()?;

    let hierarchy = NetHierarchy {
        nets: NetLevels::from_top(i_top, top),
        lists: CListStore {
            c,
            base,
            ranges,
            payload,
        },
        tree,
    };
    Ok(NetIndex::from_parts(points, hierarchy))
}

fn check_tree(
    m: usize,
    nodes: &[TreeNode],
    parent: &[u32],
    child_start: &[u32],
    children: &[u32],
) -> Result<()> {
    let n = nodes.len();
    if n < m || child_start.len() != n + 1 || children.len() + 1 != n {
        return Err(bad("tree arrays have inconsistent sizes"));
    }
    if parent[0] != NO_PARENT || parent[1..].iter().enumerate().any(|(v, &p)| p as usize > v) {
        return Err(bad("tree is not in preorder"));
    }
    if child_start[0] != 0
        || child_start.windows(2).any(|w| w[0] > w[1])
        || child_start[n] as usize != children.len()
    {
        return Err(bad("child offsets are inconsistent"));
    }
    for v in 0..n {
        for &c in &children[child_start[v] as usize..child_start[v + 1] as usize] {
            if c as usize >= n || parent[c as usize] as usize != v {
                return Err(bad("child and parent links disagree"));
            }
        }
    }
    let mut leaves = vec![false; m];
    for node in nodes.iter().filter(|node| node.lo == 0) {
        if std::mem::replace(&mut leaves[node.point.index()], true) {
            return Err(bad("point has two leaves"));
        }
    }
    if leaves.contains(&false) {
        return Err(bad("point without a leaf"));
    }
    Ok(())
}

fn check_lists(m: usize, top: &[i32], base: &[u32], ranges: &[u32], payload: &[u32]) -> Result<()> {
    if base.len() != m + 1 {
        return Err(bad("list base has the wrong size"));
    }
    let slots: usize = top.iter().map(|&t| t as usize + 1).sum();
    if ranges.len() != slots + 1 {
        return Err(bad("list ranges have the wrong size"));
    }
    let mut next = 0u64;
    for (y, &b) in base.iter().enumerate() {
        if b as u64 != next {
            return Err(bad("list base offsets are inconsistent"));
        }
        next += top.get(y).map_or(0, |&t| t as u64 + 1);
    }
    if ranges[0] != 0
        || ranges.windows(2).any(|w| w[0] > w[1])
        || ranges[slots] as usize != payload.len()
    {
        return Err(bad("list ranges are inconsistent"));
    }
    if payload.iter().any(|&z| z as usize >= m) {
        return Err(bad("list entry out of range"));
    }
    Ok(())
}

/// Writes an index to `w`.
pub fn save<W: Write>(index: &NetIndex, mut w: W) -> Result<()> {
    w.write_all(&to_bytes(index))?;
    w.flush()?;
    Ok(())
}

/// Reads an index from `r`.
pub fn load<R: Read>(mut r: R) -> Result<NetIndex> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

pub fn save_file(index: &NetIndex, path: impl AsRef<Path>) -> Result<()> {
    save(index, BufWriter::new(File::create(path)?))
}

pub fn load_file(path: impl AsRef<Path>) -> Result<NetIndex> {
    load(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> NetIndex {
        let ps = PointSet::from_coords(1, vec![0.0, 1.0, 2.0, 4.0, 9.0, 9.5], Norm::L1).unwrap();
        NetIndex::build(ps, 8).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let idx = sample();
        let bytes = to_bytes(&idx);
        let back = from_bytes(&bytes).unwrap();
        assert_eq!(back, idx);
        assert_eq!(to_bytes(&back), bytes);
    }

    #[test]
    fn matrix_round_trip() {
        let d = vec![0.0, 2.0, 3.0, 2.0, 0.0, 4.0, 3.0, 4.0, 0.0];
        let idx = NetIndex::build(PointSet::from_matrix(3, d).unwrap(), 8).unwrap();
        assert_eq!(from_bytes(&to_bytes(&idx)).unwrap(), idx);
    }

    #[test]
    fn single_point_round_trip() {
        let idx = NetIndex::build(
            PointSet::from_coords(2, vec![3.0, 4.0], Norm::L2).unwrap(),
            8,
        )
        .unwrap();
        assert_eq!(from_bytes(&to_bytes(&idx)).unwrap(), idx);
    }

    #[test]
    fn corrupt_input_is_rejected() {
        let bytes = to_bytes(&sample());
        assert!(matches!(
            from_bytes(&bytes[..bytes.len() - 3]),
            Err(Error::Format(_))
        ));
        assert!(matches!(from_bytes(b"NOTANIDX"), Err(Error::Format(_))));
        let mut v = bytes.clone();
        v[8] = 9;
        assert!(matches!(from_bytes(&v), Err(Error::Format(_))));
        for cut in 0..bytes.len() {
            assert!(from_bytes(&bytes[..cut]).is_err());
        }
    }
}
