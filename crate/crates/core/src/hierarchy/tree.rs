//! The compacted hierarchy tree `T`.

use crate::metric::PointId;

/// A point together with one of the levels it occupies.
pub type LevelCopy = (PointId, i32);

pub(crate) const NONE: u32 = u32::MAX;

/// Index of a node of the compacted hierarchy tree. Node ids follow DFS
/// preorder, so the root is node 0 and every subtree is a contiguous range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A compacted node: copies of `point` at every level in `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub point: PointId,
    pub hi: i32,
    pub lo: i32,
}

/// The hierarchy tree with limited compaction.
///
/// A run of copies of one point is contracted while each copy has a trivial
/// c-list. Children are ordered by ascending point id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyTree {
    pub(crate) nodes: Vec<TreeNode>,
    pub(crate) parent: Vec<u32>,
    pub(crate) child_start: Vec<u32>,
    pub(crate) children: Vec<u32>,
    pub(crate) subtree_end: Vec<u32>,
    pub(crate) leaf: Vec<u32>,
}

impl HierarchyTree {
    /// Assembles the tree from unordered nodes and parent links, ordering
    /// children by point id and renumbering nodes in DFS preorder.
    pub(crate) fn from_links(nodes: Vec<TreeNode>, parent: Vec<u32>, m: usize) -> Self {
        let n = nodes.len();
        let mut kids: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut root = NONE;
        for (v, &p) in parent.iter().enumerate() {
            if p == NONE {
                root = v as u32;
            } else {
                kids[p as usize].push(v as u32);
            }
        }
        for list in &mut kids {
            list.sort_by_key(|&c| nodes[c as usize].point);
        }
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(kids[v as usize].iter().rev());
        }
        let mut rank = vec![0u32; n];
        for (r, &v) in order.iter().enumerate() {
            rank[v as usize] = r as u32;
        }
        let new_nodes: Vec<TreeNode> = order.iter().map(|&v| nodes[v as usize]).collect();
        let new_parent: Vec<u32> = order
            .iter()
            .map(|&v| match parent[v as usize] {
                NONE => NONE,
                p => rank[p as usize],
            })
            .collect();
        let mut child_start = Vec::with_capacity(n + 1);
        let mut children = Vec::with_capacity(n.saturating_sub(1));
        for &v in &order {
            child_start.push(children.len() as u32);
            children.extend(kids[v as usize].iter().map(|&c| rank[c as usize]));
        }
        child_start.push(children.len() as u32);
        Self::finish(new_nodes, new_parent, child_start, children, m)
    }

    /// Derives subtree ranges and leaf lookup from preorder-numbered arrays.
    pub(crate) fn finish(
        nodes: Vec<TreeNode>,
        parent: Vec<u32>,
        child_start: Vec<u32>,
        children: Vec<u32>,
        m: usize,
    ) -> Self {
        let n = nodes.len();
        let mut subtree_end: Vec<u32> = (1..=n as u32).collect();
        for v in (1..n).rev() {
            let p = parent[v] as usize;
            subtree_end[p] = subtree_end[p].max(subtree_end[v]);
        }
        let mut leaf = vec![NONE; m];
        for (v, node) in nodes.iter().enumerate() {
            if node.lo == 0 {
                leaf[node.point.index()] = v as u32;
            }
        }
        HierarchyTree {
            nodes,
            parent,
            child_start,
            children,
            subtree_end,
            leaf,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    #[inline]
    pub fn node(&self, v: NodeId) -> TreeNode {
        self.nodes[v.index()]
    }

    #[inline]
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        match self.parent[v.index()] {
            NONE => None,
            p => Some(NodeId(p)),
        }
    }

    /// Children in ascending point-id order (equivalently, preorder).
    #[inline]
    pub fn children(&self, v: NodeId) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        let s = self.child_start[v.index()] as usize;
        let e = self.child_start[v.index() + 1] as usize;
        self.children[s..e].iter().map(|&c| NodeId(c))
    }

    pub(crate) fn child_slice(&self, v: NodeId) -> &[u32] {
        let s = self.child_start[v.index()] as usize;
        let e = self.child_start[v.index() + 1] as usize;
        &self.children[s..e]
    }

    /// The level-0 node holding point `p`.
    #[inline]
    pub fn leaf(&self, p: PointId) -> NodeId {
        NodeId(self.leaf[p.index()])
    }

    /// True if `u` is `v` or an ancestor of `v`.
    #[inline]
    pub fn is_ancestor(&self, u: NodeId, v: NodeId) -> bool {
        u.0 <= v.0 && v.0 < self.subtree_end[u.index()]
    }

    /// The child of `u` whose subtree contains the proper descendant `v`.
    pub fn child_toward(&self, u: NodeId, v: NodeId) -> NodeId {
        debug_assert!(u != v && self.is_ancestor(u, v));
        let kids = self.child_slice(u);
        let pos = kids.partition_point(|&c| c <= v.0);
        NodeId(kids[pos - 1])
    }

    /// Every (point, level) pair of the uncompacted tree with its uncompacted
    /// parent, in no particular order.
    pub fn uncompacted_edges(&self) -> Vec<(LevelCopy, Option<LevelCopy>)> {
        let mut out = Vec::new();
        for (v, node) in self.nodes.iter().enumerate() {
            for level in node.lo..=node.hi {
                let up = if level < node.hi {
                    Some((node.point, level + 1))
                } else {
                    match self.parent[v] {
                        NONE => None,
                        p => Some((self.nodes[p as usize].point, level + 1)),
                    }
                };
                out.push(((node.point, level), up));
            }
        }
        out
    }
}
