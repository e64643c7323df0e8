//! The projected tree `T|Q`: the subtree of `T` spanned by the leaves of a
//! query set, compacted over its non-branching paths.

use crate::error::{Error, Result};
use crate::hierarchy::NodeId;
use crate::index::NetIndex;
use crate::metric::{PointId, WeightedPoint};

const NO_PARENT: u32 = u32::MAX;

/// A node of the compacted `T|Q`.
///
/// It stands for the uncompacted path from the copy of `point` at `level`
/// (a leaf or a branching node of `T|Q`) up to level `hi`, just below its
/// compacted parent. The copies above `level` may belong to other points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProjNode {
    pub tnode: NodeId,
    pub point: PointId,
    pub level: i32,
    pub hi: i32,
    pub weight: u32,
    pub parent: Option<u32>,
}

/// Compacted `T|Q` with leaf-count weights. Nodes are in DFS preorder, so
/// node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectedTree {
    nodes: Vec<ProjNode>,
    child_start: Vec<u32>,
    children: Vec<u32>,
    /// (query point, node) for every leaf, sorted by point.
    leaves: Vec<(PointId, u32)>,
}

/// A node of the uncompacted `T|Q`: the copy at `level` of the point held by
/// `tnode`, whose closest compacted descendant-or-self is `proj`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UNode {
    pub proj: u32,
    pub level: i32,
    pub tnode: NodeId,
}

/// One representative of a [`RepresentativeSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Representative {
    pub point: PointId,
    pub level: i32,
    pub weight: u32,
    pub node: u32,
}

/// Query points mapped to their highest compacted ancestor at a level no
/// greater than `k_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentativeSet {
    pub k_max: i32,
    pub reps: Vec<Representative>,
    /// For each point of the subset (in the order given), its index in `reps`.
    pub assignment: Vec<u32>,
}

impl RepresentativeSet {
    pub fn weighted(&self) -> Vec<WeightedPoint> {
        self.reps
            .iter()
            .map(|r| WeightedPoint {
                point: r.point,
                weight: r.weight as u64,
            })
            .collect()
    }
}

impl ProjectedTree {
    /// Builds the compacted `T|Q` from the leaves of `q` sorted by DFS rank,
    /// keeping the current rightmost root path on a stack. Duplicate query
    /// points are merged.
    pub fn build(index: &NetIndex, q: &[PointId]) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::EmptyQuery);
        }
        for &p in q {
            index.points.check(p)?;
        }
        let tree = index.tree();
        let nav = &index.nav;
        let mut leaves: Vec<u32> = q.iter().map(|&p| tree.leaf(p).0).collect();
        leaves.sort_unstable();
        leaves.dedup();

        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(2 * leaves.len());
        let mut members: Vec<u32> = leaves.clone();
        let mut stack: Vec<u32> = Vec::new();
        for &v in &leaves {
            let Some(&top) = stack.last() else {
                stack.push(v);
                continue;
            };
            let l = nav.lca(NodeId(top), NodeId(v)).0;
            let dl = nav.depth(NodeId(l));
            while stack.len() >= 2 && nav.depth(NodeId(stack[stack.len() - 2])) >= dl {
                let child = stack.pop().unwrap();
                edges.push((*stack.last().unwrap(), child));
            }
            if *stack.last().unwrap() != l {
                let child = stack.pop().unwrap();
                edges.push((l, child));
                stack.push(l);
                members.push(l);
            }
            stack.push(v);
        }
        while stack.len() >= 2 {
            let child = stack.pop().unwrap();
            edges.push((*stack.last().unwrap(), child));
        }

        // T node ids are preorder, so sorting by them yields preorder of T|Q.
        members.sort_unstable();
        members.dedup();
        let local = |t: u32| members.binary_search(&t).unwrap() as u32;
        let k = members.len();
        let mut parent = vec![NO_PARENT; k];
        let mut kids: Vec<Vec<u32>> = vec![Vec::new(); k];
        for &(p, c) in &edges {
            let (lp, lc) = (local(p), local(c));
            parent[lc as usize] = lp;
            kids[lp as usize].push(lc);
        }
        let mut weight = vec![0u32; k];
        for (j, &t) in members.iter().enumerate() {
            if tree.node(NodeId(t)).lo == 0 {
                weight[j] = 1;
            }
        }
        for j in (1..k).rev() {
            weight[parent[j] as usize] += weight[j];
        }
        let mut nodes = Vec::with_capacity(k);
        for (j, &t) in members.iter().enumerate() {
            let tn = tree.node(NodeId(t));
            let hi = match parent[j] {
                NO_PARENT => tn.lo,
                p => tree.node(NodeId(members[p as usize])).lo - 1,
            };
            nodes.push(ProjNode {
                tnode: NodeId(t),
                point: tn.point,
                level: tn.lo,
                hi,
                weight: weight[j],
                parent: (parent[j] != NO_PARENT).then_some(parent[j]),
            });
        }
        let mut child_start = Vec::with_capacity(k + 1);
        let mut children = Vec::with_capacity(k.saturating_sub(1));
        for list in &mut kids {
            list.sort_unstable();
            child_start.push(children.len() as u32);
            children.extend_from_slice(list);
        }
        child_start.push(children.len() as u32);
        let mut leaf_map: Vec<(PointId, u32)> = nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.level == 0)
            .map(|(j, n)| (n.point, j as u32))
            .collect();
        leaf_map.sort_unstable();
        Ok(ProjectedTree {
            nodes,
            child_start,
            children,
            leaves: leaf_map,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[ProjNode] {
        &self.nodes
    }

    pub fn node(&self, j: u32) -> &ProjNode {
        &self.nodes[j as usize]
    }

    pub fn root(&self) -> u32 {
        0
    }

    /// Level of the root: where the query's leaves first merge, or 0 when
    /// the query holds one distinct point.
    pub fn root_level(&self) -> i32 {
        self.nodes[0].level
    }

    /// Number of distinct query points.
    pub fn total_weight(&self) -> u32 {
        self.nodes[0].weight
    }

    pub fn children(&self, j: u32) -> &[u32] {
        let s = self.child_start[j as usize] as usize;
        let e = self.child_start[j as usize + 1] as usize;
        &self.children[s..e]
    }

    /// The leaf node of query point `q`.
    pub fn leaf_of(&self, q: PointId) -> Option<u32> {
        self.leaves
            .binary_search_by_key(&q, |&(p, _)| p)
            .ok()
            .map(|pos| self.leaves[pos].1)
    }

    /// Distinct query points in ascending id order.
    pub fn query_points(&self) -> impl Iterator<Item = PointId> + '_ {
        self.leaves.iter().map(|&(p, _)| p)
    }

    /// The root as a node of the uncompacted tree.
    pub fn root_unode(&self) -> UNode {
        UNode {
            proj: 0,
            level: self.nodes[0].level,
            tnode: self.nodes[0].tnode,
        }
    }

    pub fn unode_point(&self, index: &NetIndex, v: UNode) -> PointId {
        index.tree().node(v.tnode).point
    }

    pub fn unode_weight(&self, v: UNode) -> u32 {
        self.nodes[v.proj as usize].weight
    }

    /// Children of `v` in the uncompacted `T|Q`, appended to `out`.
    ///
    /// At a compacted node there is one child per compacted child; on a
    /// non-branching stretch the only child continues toward `v.proj`.
    /// Stepping below a `T` node picks the child of that node whose subtree
    /// holds the target.
    pub fn children_uncompacted(&self, index: &NetIndex, v: UNode, out: &mut Vec<UNode>) {
        let tree = index.tree();
        let step = |tnode: NodeId, level: i32, target: NodeId| {
            if tree.node(tnode).lo <= level {
                tnode
            } else {
                tree.child_toward(tnode, target)
            }
        };
        let w = &self.nodes[v.proj as usize];
        if v.level > w.level {
            out.push(UNode {
                proj: v.proj,
                level: v.level - 1,
                tnode: step(v.tnode, v.level - 1, w.tnode),
            });
        } else {
            for &u in self.children(v.proj) {
                let target = self.nodes[u as usize].tnode;
                out.push(UNode {
                    proj: u,
                    level: v.level - 1,
                    tnode: step(v.tnode, v.level - 1, target),
                });
            }
        }
    }

    /// Maps each point of `subset` to its highest compacted ancestor whose
    /// level is at most `k_max` (the leaf itself when no ancestor qualifies)
    /// and aggregates weights per representative, in preorder.
    pub fn representatives_at(&self, subset: &[PointId], k_max: i32) -> Result<RepresentativeSet> {
        let k = self.nodes.len();
        let mut rep = vec![NO_PARENT; k];
        for j in 0..k {
            let node = &self.nodes[j];
            if node.level <= k_max {
                rep[j] = match node.parent {
                    Some(p) if rep[p as usize] != NO_PARENT => rep[p as usize],
                    _ => j as u32,
                };
            }
        }
        let mut slot = vec![NO_PARENT; k];
        let mut order: Vec<u32> = Vec::new();
        let mut leaf_rep = Vec::with_capacity(subset.len());
        for &q in subset {
            let leaf = self.leaf_of(q).ok_or_else(|| {
                Error::InvalidParams(format!("point {q} is not part of the projected query"))
            })?;
            let r = if rep[leaf as usize] == NO_PARENT {
                leaf
            } else {
                rep[leaf as usize]
            };
            leaf_rep.push(r);
            if slot[r as usize] == NO_PARENT {
                slot[r as usize] = 0;
                order.push(r);
            }
        }
        order.sort_unstable();
        let mut reps: Vec<Representative> = order
            .iter()
            .enumerate()
            .map(|(pos, &r)| {
                slot[r as usize] = pos as u32;
                let n = &self.nodes[r as usize];
                Representative {
                    point: n.point,
                    level: n.level,
                    weight: 0,
                    node: r,
                }
            })
            .collect();
        let assignment: Vec<u32> = leaf_rep
            .iter()
            .map(|&r| {
                let pos = slot[r as usize];
                reps[pos as usize].weight += 1;
                pos
            })
            .collect();
        Ok(RepresentativeSet {
            k_max,
            reps,
            assignment,
        })
    }
}
