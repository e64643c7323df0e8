//! Vantage-point tree for fixed-radius searches during index construction.

use crate::metric::PointSet;

const LEAF_SIZE: usize = 8;

/// Range-search engine over a subset of a point set.
///
/// `Linear` scans every item and is used for matrix backings, where the
/// triangle inequality is only sample-checked and pruning could drop results.
pub(crate) enum RangeIndex {
    Vp(VpTree),
    Linear(Vec<u32>),
}

impl RangeIndex {
    pub(crate) fn new(ps: &PointSet, items: Vec<u32>, use_tree: bool) -> Self {
        if use_tree {
            RangeIndex::Vp(VpTree::build(ps, items))
        } else {
            RangeIndex::Linear(items)
        }
    }

    /// Calls `f(id, dist)` for every item within `radius` of `q`
    /// (`dist < radius` if `strict`, else `dist <= radius`). Visiting stops
    /// early when `f` returns `false`; the return value reports whether the
    /// scan ran to completion.
    pub(crate) fn visit<F>(
        &self,
        ps: &PointSet,
        q: usize,
        radius: f64,
        strict: bool,
        mut f: F,
    ) -> bool
    where
        F: FnMut(u32, f64) -> bool,
    {
        let hit = |d: f64| if strict { d < radius } else { d <= radius };
        match self {
            RangeIndex::Linear(items) => {
                for &x in items {
                    let d = ps.dist_idx(q, x as usize);
                    if hit(d) && !f(x, d) {
                        return false;
                    }
                }
                true
            }
            RangeIndex::Vp(tree) => tree.visit(ps, q, radius, &hit, &mut f),
        }
    }
}

/// Implicit layout: the node covering `items[lo..hi]` keeps its vantage
/// point at `items[lo]`, the inner half in `items[lo+1..mid]` and the outer
/// half in `items[mid..hi]`, with `mid = lo + 1 + (hi - lo - 1) / 2`.
pub(crate) struct VpTree {
    items: Vec<u32>,
    inner_max: Vec<f64>,
    outer_min: Vec<f64>,
}

#[inline]
fn split(lo: usize, hi: usize) -> usize {
    lo + 1 + (hi - lo - 1) / 2
}

impl VpTree {
    pub(crate) fn build(ps: &PointSet, mut items: Vec<u32>) -> Self {
        let n = items.len();
        let mut inner_max = vec![0.0; n];
        let mut outer_min = vec![0.0; n];
        let mut dist = vec![0.0f64; n];
        let mut stack = vec![(0usize, n)];
        while let Some((lo, hi)) = stack.pop() {
            if hi - lo <= LEAF_SIZE {
                continue;
            }
            let vp = items[lo] as usize;
            for k in lo + 1..hi {
                dist[k] = ps.dist_idx(vp, items[k] as usize);
            }
            let mid = split(lo, hi);
            let mut pairs: Vec<(f64, u32)> = (lo + 1..hi).map(|k| (dist[k], items[k])).collect();
            pairs.select_nth_unstable_by(mid - lo - 1, |a, b| {
                a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
            });
            let inner = &pairs[..mid - lo - 1];
            let outer = &pairs[mid - lo - 1..];
            inner_max[lo] = inner.iter().map(|p| p.0).fold(0.0, f64::max);
            outer_min[lo] = outer.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            for (k, &(_, id)) in pairs.iter().enumerate() {
                items[lo + 1 + k] = id;
            }
            stack.push((lo + 1, mid));
            stack.push((mid, hi));
        }
        VpTree {
            items,
            inner_max,
            outer_min,
        }
    }

    fn visit<H, F>(&self, ps: &PointSet, q: usize, radius: f64, hit: &H, f: &mut F) -> bool
    where
        H: Fn(f64) -> bool,
        F: FnMut(u32, f64) -> bool,
    {
        let mut stack = vec![(0usize, self.items.len())];
        while let Some((lo, hi)) = stack.pop() {
            if hi - lo <= LEAF_SIZE {
                for &x in &self.items[lo..hi] {
                    let d = ps.dist_idx(q, x as usize);
                    if hit(d) && !f(x, d) {
                        return false;
                    }
                }
                continue;
            }
            let vp = self.items[lo];
            let d = ps.dist_idx(q, vp as usize);
            if hit(d) && !f(vp, d) {
                return false;
            }
            // Slack absorbs rounding in the triangle inequality.
            let tol = 1e-9 * (d + radius);
            let mid = split(lo, hi);
            if d + radius + tol >= self.outer_min[lo] {
                stack.push((mid, hi));
            }
            if d - radius - tol <= self.inner_max[lo] {
                stack.push((lo + 1, mid));
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let coords: Vec<f64> = (0..600).map(|_| rng.gen_range(0.0..100.0)).collect();
        let ps = PointSet::from_coords(2, coords, Norm::L2).unwrap();
        let ids: Vec<u32> = (0..300).filter(|i| i % 3 != 1).collect();
        let tree = RangeIndex::new(&ps, ids.clone(), true);
        let lin = RangeIndex::new(&ps, ids, false);
        for q in 0..300 {
            for &(r, strict) in &[(5.0, true), (40.0, false), (0.0, false)] {
                let mut a = Vec::new();
                let mut b = Vec::new();
                tree.visit(&ps, q, r, strict, |x, _| {
                    a.push(x);
                    true
                });
                lin.visit(&ps, q, r, strict, |x, _| {
                    b.push(x);
                    true
                });
                a.sort_unstable();
                b.sort_unstable();
                assert_eq!(a, b);
            }
        }
    }
}
