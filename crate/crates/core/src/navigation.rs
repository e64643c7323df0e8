//! Navigation over the compacted tree: DFS leaf ranks, constant-time LCA and
//! level-ancestor lookup.

use crate::error::{Error, Result};
use crate::hierarchy::{HierarchyTree, NodeId};
use crate::metric::PointId;

/// DFS ranks of the leaves, LCA tables and ancestor jump tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Navigation {
    rank: Vec<u32>,
    by_rank: Vec<PointId>,
    depth: Vec<u32>,
    first: Vec<u32>,
    /// `sparse[k][j]`: node of least depth among Euler entries `j..j + 2^k`.
    sparse: Vec<Vec<u32>>,
    /// `jump[k][v]`: the `2^k`-th ancestor of `v`, saturating at the root.
    jump: Vec<Vec<u32>>,
}

impl Navigation {
    pub fn build(tree: &HierarchyTree) -> Self {
        let n = tree.len();
        let m = tree.leaf.len();

        let mut depth = vec![0u32; n];
        for v in 1..n {
            depth[v] = depth[tree.parent[v] as usize] + 1;
        }

        // Leaves in preorder are the DFS leaf order.
        let mut rank = vec![0u32; m];
        let mut by_rank = Vec::with_capacity(m);
        for node in &tree.nodes {
            if node.lo == 0 {
                rank[node.point.index()] = by_rank.len() as u32;
                by_rank.push(node.point);
            }
        }

        let mut euler = Vec::with_capacity(2 * n);
        let mut first = vec![0u32; n];
        let mut stack: Vec<(u32, u32)> = vec![(0, 0)];
        while let Some(top) = stack.len().checked_sub(1) {
            let (v, next) = stack[top];
            if next == 0 {
                first[v as usize] = euler.len() as u32;
            }
            euler.push(v);
            let kids = tree.child_slice(NodeId(v));
            if (next as usize) < kids.len() {
                stack[top].1 += 1;
                stack.push((kids[next as usize], 0));
            } else {
                stack.pop();
            }
        }
        let shallower = |a: u32, b: u32| {
            if depth[b as usize] < depth[a as usize] {
                b
            } else {
                a
            }
        };
        let mut sparse = vec![euler];
        let mut width = 1;
        while 2 * width <= sparse[0].len() {
            let prev = sparse.last().unwrap();
            let row: Vec<u32> = (0..prev.len() - width)
                .map(|j| shallower(prev[j], prev[j + width]))
                .collect();
            sparse.push(row);
            width *= 2;
        }

        let root_parent: Vec<u32> = (0..n)
            .map(|v| if v == 0 { 0 } else { tree.parent[v] })
            .collect();
        let mut jump = vec![root_parent];
        let max_depth = depth.iter().copied().max().unwrap_or(0);
        while (1u64 << jump.len()) <= max_depth as u64 {
            let prev = jump.last().unwrap();
            let row: Vec<u32> = (0..n).map(|v| prev[prev[v] as usize]).collect();
            jump.push(row);
        }

        Navigation {
            rank,
            by_rank,
            depth,
            first,
            sparse,
            jump,
        }
    }

    /// Position of `q` among the leaves in DFS order.
    #[inline]
    pub fn dfs_rank(&self, q: PointId) -> u32 {
        self.rank[q.index()]
    }

    /// Leaves listed by DFS rank.
    pub fn dfs_order(&self) -> &[PointId] {
        &self.by_rank
    }

    #[inline]
    pub fn depth(&self, v: NodeId) -> u32 {
        self.depth[v.index()]
    }

    /// Lowest common ancestor of two nodes of the compacted tree.
    #[inline]
    pub fn lca(&self, u: NodeId, v: NodeId) -> NodeId {
        let (mut a, mut b) = (
            self.first[u.index()] as usize,
            self.first[v.index()] as usize,
        );
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let len = b - a + 1;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let x = self.sparse[k][a];
        let y = self.sparse[k][b + 1 - (1 << k)];
        if self.depth[y as usize] < self.depth[x as usize] {
            NodeId(y)
        } else {
            NodeId(x)
        }
    }

    /// The ancestor of `q` at level `i`: the point whose copy in `Y_i` lies on
    /// `q`'s root path, and the compacted node holding that copy.
    pub fn level_ancestor(
        &self,
        tree: &HierarchyTree,
        q: PointId,
        i: i32,
    ) -> Result<(PointId, NodeId)> {
        let top = tree.node(tree.root()).hi;
        if i < 0 || i > top {
            return Err(Error::InvalidLevel { level: i, top });
        }
        if q.index() >= tree.leaf.len() {
            return Err(Error::InvalidPoint {
                id: q.index(),
                m: tree.leaf.len(),
            });
        }
        let v = self.ancestor_covering(tree, tree.leaf(q), i);
        Ok((tree.node(v).point, v))
    }

    /// The ancestor-or-self of `v` whose level range contains `i`, for
    /// `tree.node(v).lo <= i <= i_top`.
    pub(crate) fn ancestor_covering(&self, tree: &HierarchyTree, v: NodeId, i: i32) -> NodeId {
        if tree.node(v).hi >= i {
            return v;
        }
        let mut v = v.0;
        for row in self.jump.iter().rev() {
            let up = row[v as usize];
            if tree.nodes[up as usize].hi < i {
                v = up;
            }
        }
        NodeId(self.jump[0][v as usize])
    }
}
