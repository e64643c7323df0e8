//! Brute-force reference implementations, written directly from the
//! definitions and sharing nothing with the fast paths beyond the metric.
//!
//! Everything here is quadratic or worse and meant for small inputs in tests
//! and benchmark validation.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::metric::{PointId, PointSet};

/// Limit on the number of center sets the exhaustive oracles enumerate.
pub const MAX_ORACLE_COMBINATIONS: u128 = 10_000_000;

/// A node of the uncompacted hierarchy tree: a point and a level.
pub type NaiveNode = (PointId, i32);

/// Nets, lists and the uncompacted tree built literally from the definitions.
#[derive(Clone, Debug, PartialEq)]
pub struct NaiveTree {
    pub i_top: i32,
    /// `nets[i]` is `Y_i` in ascending id order.
    pub nets: Vec<Vec<PointId>>,
    /// Parent of every copy; `None` for the root.
    pub parent: BTreeMap<NaiveNode, Option<NaiveNode>>,
    /// `L_{y,i,c}` for every `y ∈ Y_i`, `0 <= i <= i_top`, sorted by id.
    pub lists: BTreeMap<NaiveNode, Vec<PointId>>,
    pub c: u32,
}

fn ids(ps: &PointSet) -> Vec<PointId> {
    (0..ps.len()).map(PointId::from).collect()
}

/// Builds nets by greedy insertion in ascending id order, the lists by full
/// scans and the tree by attaching each copy to its own point's copy above or
/// else to the smallest-id net point within `2^i`.
pub fn naive_build(ps: &PointSet, c: u32) -> NaiveTree {
    let all = ids(ps);
    let mut diam = 0.0f64;
    for &a in &all {
        for &b in &all {
            diam = diam.max(ps.distance(a, b));
        }
    }
    let mut i_top = 0;
    while (2.0f64).powi(i_top) <= diam {
        i_top += 1;
    }
    let mut nets = vec![all.clone()];
    for i in 1..=i_top {
        let r = (2.0f64).powi(i);
        let mut net: Vec<PointId> = Vec::new();
        for &z in &nets[(i - 1) as usize] {
            if net.iter().all(|&y| ps.distance(y, z) >= r) {
                net.push(z);
            }
        }
        nets.push(net);
    }
    let in_net = |p: PointId, i: i32| nets[i as usize].binary_search(&p).is_ok();

    let mut lists = BTreeMap::new();
    for i in 0..=i_top {
        let below = if i == 0 {
            &all
        } else {
            &nets[(i - 1) as usize]
        };
        let r = c as f64 * (2.0f64).powi(i);
        for &y in &nets[i as usize] {
            let list: Vec<PointId> = below
                .iter()
                .copied()
                .filter(|&z| ps.distance(y, z) <= r)
                .collect();
            lists.insert((y, i), list);
        }
    }

    let mut parent = BTreeMap::new();
    for i in 0..=i_top {
        for &z in &nets[i as usize] {
            let up = if i == i_top {
                None
            } else if in_net(z, i + 1) {
                Some((z, i + 1))
            } else {
                let r = (2.0f64).powi(i + 1);
                let y = nets[(i + 1) as usize]
                    .iter()
                    .copied()
                    .find(|&y| ps.distance(y, z) <= r)
                    .expect("covering");
                Some((y, i + 1))
            };
            parent.insert((z, i), up);
        }
    }
    NaiveTree {
        i_top,
        nets,
        parent,
        lists,
        c,
    }
}

impl NaiveTree {
    pub fn root(&self) -> NaiveNode {
        (self.nets[self.i_top as usize][0], self.i_top)
    }

    /// Children of every copy, ordered by point id.
    pub fn children(&self) -> BTreeMap<NaiveNode, Vec<NaiveNode>> {
        let mut kids: BTreeMap<NaiveNode, Vec<NaiveNode>> = BTreeMap::new();
        for (&v, &p) in &self.parent {
            kids.entry(v).or_default();
            if let Some(p) = p {
                kids.entry(p).or_default().push(v);
            }
        }
        for list in kids.values_mut() {
            list.sort();
        }
        kids
    }

    /// Root-to-copy path, starting at `v` and ending at the root.
    pub fn path_up(&self, v: NaiveNode) -> Vec<NaiveNode> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(&Some(p)) = self.parent.get(&cur) {
            path.push(p);
            cur = p;
        }
        path
    }

    /// Deepest common ancestor of two copies by walking both paths.
    pub fn lca(&self, a: NaiveNode, b: NaiveNode) -> NaiveNode {
        let pa = self.path_up(a);
        let pb: BTreeSet<NaiveNode> = self.path_up(b).into_iter().collect();
        *pa.iter().find(|v| pb.contains(v)).expect("common root")
    }

    /// The copy at level `i` on the root path of leaf `q`.
    pub fn level_ancestor(&self, q: PointId, i: i32) -> NaiveNode {
        *self
            .path_up((q, 0))
            .iter()
            .find(|v| v.1 == i)
            .expect("level within range")
    }

    /// Leaves in depth-first order, children visited by ascending point id.
    pub fn dfs_leaf_order(&self) -> Vec<PointId> {
        let kids = self.children();
        let mut out = Vec::new();
        let mut stack = vec![self.root()];
        while let Some(v) = stack.pop() {
            if v.1 == 0 {
                out.push(v.0);
            }
            stack.extend(kids[&v].iter().rev());
        }
        out
    }

    /// `L_{y,i,c_query}` by direct filtering of the definition, for any level
    /// `i <= i_top` (negative levels range over all of `M`). Sorted by id.
    pub fn filtered_list(&self, ps: &PointSet, y: PointId, i: i32, c_query: f64) -> Vec<PointId> {
        let below: &[PointId] = if i <= 0 {
            &self.nets[0]
        } else {
            &self.nets[(i - 1) as usize]
        };
        let r = c_query * (2.0f64).powi(i);
        below
            .iter()
            .copied()
            .filter(|&z| ps.distance(y, z) <= r)
            .collect()
    }

    /// Points of level `j` reached from `y ∈ Y_i` by recursively scanning
    /// lists of radius `c_query`, computed by depth-first recursion.
    pub fn recursive_scan(
        &self,
        ps: &PointSet,
        y: PointId,
        i: i32,
        j: i32,
        c_query: f64,
    ) -> BTreeSet<PointId> {
        #[allow(clippy::too_many_arguments)]
        fn go(
            t: &NaiveTree,
            ps: &PointSet,
            y: PointId,
            i: i32,
            j: i32,
            c: f64,
            seen: &mut BTreeSet<NaiveNode>,
            out: &mut BTreeSet<PointId>,
        ) {
            if !seen.insert((y, i)) {
                return;
            }
            if i == j {
                out.insert(y);
                return;
            }
            for z in t.filtered_list(ps, y, i, c) {
                go(t, ps, z, i - 1, j, c, seen, out);
            }
        }
        let mut out = BTreeSet::new();
        go(self, ps, y, i, j, c_query, &mut BTreeSet::new(), &mut out);
        out
    }

    /// The subtree induced by the leaves of `q`, as copies with their leaf
    /// counts, including the whole path up to the root.
    pub fn induced_subtree(&self, q: &[PointId]) -> BTreeMap<NaiveNode, u32> {
        let mut weight = BTreeMap::new();
        let leaves: BTreeSet<PointId> = q.iter().copied().collect();
        for &p in &leaves {
            for v in self.path_up((p, 0)) {
                *weight.entry(v).or_insert(0) += 1;
            }
        }
        weight
    }

    /// Compaction of the induced subtree: leaves and branching copies, each
    /// with its nearest kept proper ancestor and its weight. The top of the
    /// result is the highest branching copy (or the single leaf).
    pub fn projection(&self, q: &[PointId]) -> Vec<NaiveProjNode> {
        let sub = self.induced_subtree(q);
        let mut kids: BTreeMap<NaiveNode, usize> = BTreeMap::new();
        for v in sub.keys() {
            if let Some(&Some(p)) = self.parent.get(v) {
                *kids.entry(p).or_insert(0) += 1;
            }
        }
        let kept: BTreeSet<NaiveNode> = sub
            .keys()
            .copied()
            .filter(|v| v.1 == 0 || kids.get(v).copied().unwrap_or(0) >= 2)
            .collect();
        let total = q.iter().collect::<BTreeSet<_>>().len() as u32;
        let top = kept
            .iter()
            .copied()
            .filter(|v| sub[v] == total)
            .max_by_key(|v| v.1)
            .expect("some copy holds every leaf");
        let mut out = Vec::new();
        for &v in &kept {
            if v.1 > top.1 {
                continue;
            }
            let parent = if v == top {
                None
            } else {
                self.path_up(v)
                    .into_iter()
                    .skip(1)
                    .find(|a| kept.contains(a))
            };
            out.push(NaiveProjNode {
                copy: v,
                parent,
                weight: sub[&v],
            });
        }
        out
    }
}

/// A node of the reference projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NaiveProjNode {
    pub copy: NaiveNode,
    pub parent: Option<NaiveNode>,
    pub weight: u32,
}

fn median_cost(ps: &PointSet, q: &[(PointId, u64)], centers: &[PointId]) -> f64 {
    q.iter()
        .map(|&(p, w)| {
            w as f64
                * centers
                    .iter()
                    .map(|&c| ps.distance(p, c))
                    .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

fn center_cost(ps: &PointSet, q: &[(PointId, u64)], centers: &[PointId]) -> f64 {
    q.iter()
        .map(|&(p, _)| {
            centers
                .iter()
                .map(|&c| ps.distance(p, c))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn unit_weights(q: &[PointId]) -> Vec<(PointId, u64)> {
    q.iter().map(|&p| (p, 1)).collect()
}

/// Exact 1-median over all `m` candidate centers; ties go to the smallest id.
pub fn exact_one_median(ps: &PointSet, q: &[PointId]) -> (PointId, f64) {
    let qw = unit_weights(q);
    let mut best = (PointId(0), f64::INFINITY);
    for c in ids(ps) {
        let cost = median_cost(ps, &qw, &[c]);
        if cost < best.1 {
            best = (c, cost);
        }
    }
    best
}

/// Exact 1-center over all `m` candidate centers; ties go to the smallest id.
pub fn exact_one_center(ps: &PointSet, q: &[PointId]) -> (PointId, f64) {
    let qw = unit_weights(q);
    let mut best = (PointId(0), f64::INFINITY);
    for c in ids(ps) {
        let cost = center_cost(ps, &qw, &[c]);
        if cost < best.1 {
            best = (c, cost);
        }
    }
    best
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.saturating_mul(n - j) / (j + 1);
    }
    acc
}

fn exhaustive(ps: &PointSet, q: &[PointId], p: usize, median: bool) -> Result<(Vec<PointId>, f64)> {
    let m = ps.len();
    if p == 0 {
        return Err(Error::InvalidParams("p must be positive".into()));
    }
    if q.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let p = p.min(m);
    let combos = binomial(m as u128, p as u128);
    if combos > MAX_ORACLE_COMBINATIONS {
        return Err(Error::TooManyCombinations {
            combinations: combos,
            limit: MAX_ORACLE_COMBINATIONS,
        });
    }
    let qw = unit_weights(q);
    let mut pick: Vec<usize> = (0..p).collect();
    let mut best: (Vec<PointId>, f64) = (Vec::new(), f64::INFINITY);
    loop {
        let centers: Vec<PointId> = pick.iter().map(|&k| PointId::from(k)).collect();
        let cost = if median {
            median_cost(ps, &qw, &centers)
        } else {
            center_cost(ps, &qw, &centers)
        };
        if cost < best.1 {
            best = (centers, cost);
        }
        // Next combination in lexicographic order.
        let mut k = p;
        while k > 0 && pick[k - 1] == m - p + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        pick[k - 1] += 1;
        for j in k..p {
            pick[j] = pick[j - 1] + 1;
        }
    }
    Ok(best)
}

/// Exact p-median over all `p`-subsets of `M`, lexicographically first among
/// ties.
pub fn exact_p_median(ps: &PointSet, q: &[PointId], p: usize) -> Result<(Vec<PointId>, f64)> {
    exhaustive(ps, q, p, true)
}

/// Exact p-center over all `p`-subsets of `M`, lexicographically first among
/// ties.
pub fn exact_p_center(ps: &PointSet, q: &[PointId], p: usize) -> Result<(Vec<PointId>, f64)> {
    exhaustive(ps, q, p, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::from_coords(1, xs.to_vec(), Norm::L2).unwrap()
    }

    fn pts(v: &[u32]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    #[test]
    fn one_median_examples() {
        let ps = line(&[0.0, 1.0, 2.0, 4.0]);
        // Centers 1 and 2 both cost 5; the smaller id wins.
        assert_eq!(
            exact_one_median(&ps, &pts(&[0, 1, 2, 3])),
            (PointId(1), 5.0)
        );
        assert_eq!(exact_one_median(&ps, &pts(&[1])), (PointId(1), 0.0));
        assert_eq!(exact_one_median(&ps, &pts(&[0, 3])), (PointId(0), 4.0));
    }

    #[test]
    fn p_median_and_center_examples() {
        let ps = line(&[0.0, 1.0, 2.0, 4.0]);
        let all = pts(&[0, 1, 2, 3]);
        assert_eq!(exact_p_median(&ps, &all, 2).unwrap(), (pts(&[1, 3]), 2.0));
        assert_eq!(exact_p_center(&ps, &all, 2).unwrap(), (pts(&[1, 3]), 1.0));
        assert_eq!(exact_p_median(&ps, &all, 4).unwrap(), (all.clone(), 0.0));
    }

    #[test]
    fn combination_guard() {
        let xs: Vec<f64> = (0..200).map(f64::from).collect();
        let ps = line(&xs);
        assert!(matches!(
            exact_p_median(&ps, &pts(&[0]), 5),
            Err(Error::TooManyCombinations { .. })
        ));
    }

    #[test]
    fn naive_build_on_small_line() {
        let ps = line(&[0.0, 1.0, 2.0, 4.0]);
        let t = naive_build(&ps, 8);
        assert_eq!(t.i_top, 3);
        assert_eq!(t.nets[1], pts(&[0, 2, 3]));
        assert_eq!(t.nets[2], pts(&[0, 3]));
        assert_eq!(t.nets[3], pts(&[0]));
        assert_eq!(t.level_ancestor(PointId(1), 1), (PointId(0), 1));
        assert_eq!(t.parent[&(PointId(3), 2)], Some((PointId(0), 3)));
    }

    #[test]
    fn naive_build_single_point() {
        let ps = line(&[5.0]);
        let t = naive_build(&ps, 8);
        assert_eq!(t.i_top, 0);
        assert_eq!(t.parent.len(), 1);
        assert_eq!(t.root(), (PointId(0), 0));
    }
}
