//! Net hierarchy: nested nets `Y_0 ⊇ Y_1 ⊇ ...`, the c-list store and the
//! compacted tree `T`.

mod build;
mod search;
mod tree;

pub use build::BuildStrategy;
pub use search::CList;
pub use tree::{HierarchyTree, LevelCopy, NodeId, TreeNode};

pub(crate) use search::{check_eps, halvings, stop_level};

use crate::metric::PointId;

/// Radius constant of the stored c-lists.
pub const DEFAULT_LIST_C: u32 = 8;

/// Smallest list radius any query path needs.
pub const MIN_LIST_C: u32 = 7;

/// Radius constant used by recursive scans in descendants searches. Three
/// suffices in exact arithmetic; one more leaves room for rounding.
pub const SCAN_C: u32 = 4;

/// The nets `Y_0..=Y_top`, stored as the highest level of each point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetLevels {
    pub(crate) i_top: i32,
    pub(crate) top: Vec<i32>,
    pub(crate) levels: Vec<Vec<PointId>>,
}

impl NetLevels {
    pub(crate) fn from_top(i_top: i32, top: Vec<i32>) -> Self {
        let mut levels = vec![Vec::new(); i_top as usize + 1];
        for (p, &t) in top.iter().enumerate() {
            for level in levels.iter_mut().take(t as usize + 1) {
                level.push(PointId::from(p));
            }
        }
        NetLevels { i_top, top, levels }
    }

    pub fn i_top(&self) -> i32 {
        self.i_top
    }

    /// Members of `Y_i` in ascending id order, for `0 <= i <= i_top`.
    pub fn level(&self, i: i32) -> &[PointId] {
        &self.levels[i as usize]
    }

    /// Highest level whose net contains `p`.
    #[inline]
    pub fn top_of(&self, p: PointId) -> i32 {
        self.top[p.index()]
    }

    /// Membership in `Y_i`, with `Y_i = M` for negative `i`.
    #[inline]
    pub fn contains(&self, p: PointId, i: i32) -> bool {
        i <= self.top[p.index()]
    }
}

/// The nontrivial c-lists `L_{y,i,c}` for every `y ∈ Y_i`, `0 <= i <= top(y)`.
///
/// Lists are sorted by (distance to `y`, id), so a smaller radius is a prefix.
/// Trivial lists (just `y`'s own copy) are stored as empty ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CListStore {
    pub(crate) c: u32,
    pub(crate) base: Vec<u32>,
    pub(crate) ranges: Vec<u32>,
    pub(crate) payload: Vec<u32>,
}

impl CListStore {
    pub fn c(&self) -> u32 {
        self.c
    }

    /// Stored entries of `L_{y,i,c}`; empty when the list is trivial.
    #[inline]
    pub fn stored(&self, y: PointId, i: i32) -> &[u32] {
        let slot = (self.base[y.index()] as i64 + i as i64) as usize;
        let s = self.ranges[slot] as usize;
        let e = self.ranges[slot + 1] as usize;
        &self.payload[s..e]
    }

    #[inline]
    pub fn is_trivial(&self, y: PointId, i: i32) -> bool {
        self.stored(y, i).is_empty()
    }

    /// Number of nontrivial lists.
    pub fn nontrivial_count(&self) -> usize {
        self.ranges.windows(2).filter(|w| w[1] > w[0]).count()
    }

    /// Total number of stored list entries.
    pub fn payload_len(&self) -> usize {
        self.payload.len()
    }
}

/// Nets, c-lists and the compacted tree of one point set.
#[derive(Clone, Debug, PartialEq)]
pub struct NetHierarchy {
    pub(crate) nets: NetLevels,
    pub(crate) lists: CListStore,
    pub(crate) tree: HierarchyTree,
}

impl NetHierarchy {
    pub fn nets(&self) -> &NetLevels {
        &self.nets
    }

    pub fn lists(&self) -> &CListStore {
        &self.lists
    }

    pub fn tree(&self) -> &HierarchyTree {
        &self.tree
    }

    pub fn i_top(&self) -> i32 {
        self.nets.i_top
    }
}
