//! 1-center and p-center queries.

use super::objective::nearest;
use super::subsets::{best_subset, Aggregate};
use super::{ceil_log2, center_eps_prime, prepare_query, ClusteringResult, Trace};
use crate::error::{Error, Result};
use crate::hierarchy::{check_eps, halvings};
use crate::index::NetIndex;
use crate::metric::{PointId, PointSet, WeightedPoint};

/// List radius used to reach the optimal centers' ancestors.
const CENTER_LIST_C: f64 = 6.0;

/// Extra farthest-point picks used to prune the candidate search.
const PRUNE_REFS: usize = 16;

/// Farthest-point traversal of `q` seeded at its smallest id.
///
/// Returns the chosen points in selection order and their covering radius
/// `max_q d(q, B)`, which is at most twice the optimal p-center radius.
/// Ties go to the smallest id. When `p` reaches the number of distinct query
/// points, all of them are returned with radius 0.
pub fn gonzalez(ps: &PointSet, q: &[PointId], p: usize) -> Result<(Vec<PointId>, f64)> {
    if p == 0 {
        return Err(Error::InvalidParams("p must be at least 1".into()));
    }
    let q = prepare_query(ps, q)?;
    if p >= q.len() {
        return Ok((q, 0.0));
    }
    let mut chosen = vec![q[0]];
    let mut dist: Vec<f64> = q.iter().map(|&x| ps.distance(x, q[0])).collect();
    while chosen.len() < p {
        let (mut far, mut best) = (0usize, -1.0f64);
        for (k, &d) in dist.iter().enumerate() {
            if d > best {
                far = k;
                best = d;
            }
        }
        let c = q[far];
        chosen.push(c);
        for (k, &x) in q.iter().enumerate() {
            let d = ps.distance(x, c);
            if d < dist[k] {
                dist[k] = d;
            }
        }
    }
    let radius = dist.iter().copied().fold(0.0, f64::max);
    Ok((chosen, radius))
}

/// p-center query.
///
/// The Gonzalez radius `alg0` fixes the level `i` with
/// `2^(i-1) < alg0 <= 2^i`. Descendants searches from the level-`i` lists of
/// the seeds' level-`i` ancestors produce candidate centers; query points are
/// merged into representatives `log(1/eps')` levels lower, and the best
/// `p`-subset of candidates for those representatives is returned. The
/// search skips points too far from the query to lead to a useful center.
pub fn p_center(index: &NetIndex, q: &[PointId], p: usize, eps: f64) -> Result<ClusteringResult> {
    let ps = index.points();
    check_eps(eps)?;
    let q = prepare_query(ps, q)?;
    let (seeds, alg0) = gonzalez(ps, &q, p)?;
    let mut trace = Trace {
        seed_size: seeds.len(),
        ..Trace::default()
    };
    if alg0 == 0.0 {
        trace.candidates = seeds.len();
        return Ok(ClusteringResult::new(ps, seeds, 0.0, trace));
    }
    let h = index.hierarchy();
    let i = ceil_log2(alg0).min(index.i_top());
    trace.final_level = Some(i);
    let eps_p = center_eps_prime(eps);

    let mut starts: Vec<PointId> = Vec::new();
    for &b in &seeds {
        let (b_i, _) = index.level_ancestor(b, i)?;
        starts.extend(h.list_iter(ps, b_i, i, CENTER_LIST_C));
    }
    starts.sort_unstable();
    starts.dedup();
    // An optimal center lies within alg0 of each point of its cluster (of
    // every query point when p = 1), and its level-l ancestor within
    // 2^(l+1) of it. Frontier points that cannot be such an ancestor are
    // dropped.
    let (refs, rho) = gonzalez(ps, &q, p + PRUNE_REFS)?;
    let keep = |u: PointId, l: i32| {
        let slack = (alg0 + 2.0f64.powi(l + 1)) * (1.0 + 1e-9);
        if p == 1 {
            refs.iter().all(|&r| ps.distance(u, r) <= slack)
        } else {
            refs.iter().any(|&r| ps.distance(u, r) <= slack + rho)
        }
    };
    let stop = crate::hierarchy::stop_level(i - 1, 2.0 * eps_p);
    let mut candidates = h.scan_to_filtered(
        ps,
        &starts,
        i - 1,
        stop,
        crate::hierarchy::SCAN_C as f64,
        keep,
    );
    candidates.extend_from_slice(&seeds);
    candidates.sort_unstable();
    candidates.dedup();
    trace.candidates = candidates.len();

    let proj = index.project(&q)?;
    let reps: Vec<WeightedPoint> = proj.representatives_at(&q, i - halvings(eps_p))?.weighted();
    trace.representatives = reps.len();
    let (centers, _) = best_subset(ps, &reps, &candidates, p, Aggregate::Max)?;
    let cost = q
        .iter()
        .map(|&x| nearest(ps, x, &centers))
        .fold(0.0, f64::max);
    Ok(ClusteringResult::new(ps, centers, cost, trace))
}

/// 1-center query: [`p_center`] with `p = 1`, seeded at the smallest id of
/// `q`.
pub fn one_center(index: &NetIndex, q: &[PointId], eps: f64) -> Result<ClusteringResult> {
    p_center(index, q, 1, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;

    fn ids(v: &[u32]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    fn small() -> NetIndex {
        let ps = PointSet::from_coords(1, vec![0.0, 1.0, 2.0, 4.0], Norm::L2).unwrap();
        NetIndex::build(ps, 8).unwrap()
    }

    #[test]
    fn gonzalez_on_small_line() {
        let idx = small();
        let (b, r) = gonzalez(idx.points(), &ids(&[0, 1, 2, 3]), 2).unwrap();
        assert_eq!((b, r), (ids(&[0, 3]), 2.0));
        let (b, r) = gonzalez(idx.points(), &ids(&[0, 1, 2, 3]), 4).unwrap();
        assert_eq!((b.len(), r), (4, 0.0));
        let (b, r) = gonzalez(idx.points(), &ids(&[1, 3]), 1).unwrap();
        assert_eq!((b, r), (ids(&[1]), 3.0));
        assert!(gonzalez(idx.points(), &ids(&[1]), 0).is_err());
    }

    #[test]
    fn centers_on_small_line() {
        let idx = small();
        for eps in [0.5, 0.25, 0.1] {
            let r = one_center(&idx, &ids(&[0, 3]), eps).unwrap();
            assert!(r.objective <= (1.0 + eps) * 2.0);
            let r = one_center(&idx, &ids(&[0, 1, 2, 3]), eps).unwrap();
            assert!(r.objective <= (1.0 + eps) * 2.0);
            let r = p_center(&idx, &ids(&[0, 1, 2, 3]), 2, eps).unwrap();
            assert!(r.objective <= (1.0 + eps) * 1.0);
        }
        let r = p_center(&idx, &ids(&[0, 2]), 3, 0.5).unwrap();
        assert_eq!((r.centers, r.objective), (ids(&[0, 2]), 0.0));
        let r = one_center(&idx, &ids(&[2, 2]), 0.5).unwrap();
        assert_eq!((r.centers, r.objective), (ids(&[2]), 0.0));
    }
}
