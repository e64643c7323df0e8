//! 1-median queries: the simple descent over the full query and the fast
//! descent over weighted representatives of the projected tree.

use super::objective::argmin;
use super::{prepare_query, AlgoParams, ClusteringResult, Trace};
use crate::error::{Error, Result};
use crate::hierarchy::halvings;
use crate::index::NetIndex;
use crate::metric::{PointId, PointSet};
use crate::projection::{ProjectedTree, UNode};

/// List radius of the simple descent.
const SIMPLE_LIST_C: f64 = 7.0;

/// Lowest level visited by the simple descent.
const SIMPLE_BOTTOM: i32 = -3;

fn median_cost(ps: &PointSet, q: &[PointId], z: PointId) -> f64 {
    q.iter().map(|&p| ps.distance(p, z)).sum()
}

fn pow2(i: i32) -> f64 {
    2.0f64.powi(i)
}

fn single_point(ps: &PointSet, q: PointId) -> ClusteringResult {
    ClusteringResult::new(ps, vec![q], 0.0, Trace::default())
}

/// 1-median by descending the hierarchy with the full query set.
///
/// From `y_top`, each level moves to the member of `L_{y,i,7}` with least
/// median cost until that cost exceeds `3n 2^(i-1)`. The point reached is
/// refined by descendants searches with refinement `eps/2` from every member
/// of its list at the halting level, keeping the cheapest candidate.
pub fn one_median_simple(index: &NetIndex, q: &[PointId], eps: f64) -> Result<ClusteringResult> {
    let ps = index.points();
    let q = prepare_query(ps, q)?;
    crate::hierarchy::check_eps(eps)?;
    if q.len() == 1 {
        return Ok(single_point(ps, q[0]));
    }
    let h = index.hierarchy();
    let n = q.len() as f64;
    let mut trace = Trace::default();
    let mut y = index.top_point();
    let mut halt = None;
    for i in (SIMPLE_BOTTOM..=index.i_top()).rev() {
        let (y_hat, cost) = argmin(h.list_iter(ps, y, i, SIMPLE_LIST_C), |z| {
            median_cost(ps, &q, z)
        })
        .expect("a list holds its own point");
        if cost > 3.0 * n * pow2(i - 1) {
            halt = Some(i);
            break;
        }
        y = y_hat;
    }
    let Some(i_fin) = halt else {
        // Below level -3 the list of y only holds y, which is then optimal.
        trace.exhausted = true;
        trace.candidates = 1;
        let cost = median_cost(ps, &q, y);
        return Ok(ClusteringResult::new(ps, vec![y], cost, trace));
    };
    trace.final_level = Some(i_fin);
    let seeds: Vec<PointId> = h.list_iter(ps, y, i_fin, SIMPLE_LIST_C).collect();
    let mut candidates = h.descendants_search_many(ps, &seeds, i_fin - 1, eps / 2.0)?;
    if let Err(pos) = candidates.binary_search(&y) {
        candidates.insert(pos, y);
    }
    trace.candidates = candidates.len();
    let (best, cost) =
        argmin(candidates, |z| median_cost(ps, &q, z)).expect("candidates are nonempty");
    Ok(ClusteringResult::new(ps, vec![best], cost, trace))
}

/// One iteration of the fast descent.
#[derive(Clone, Debug, PartialEq)]
pub struct FastIteration {
    pub level: i32,
    /// Current center `y_i`.
    pub y: PointId,
    /// Representatives kept at this level with their weights.
    pub reps: Vec<(PointId, u32)>,
    /// Weight of the representatives skipped at this level.
    pub skipped_weight: u64,
    /// Accumulated far cost after this level.
    pub summ: f64,
    /// Query points that are far after this level, sorted.
    pub far: Vec<PointId>,
}

/// Full record of a fast 1-median descent.
#[derive(Clone, Debug, PartialEq)]
pub struct FastTrace {
    pub n: usize,
    pub root_level: i32,
    pub iterations: Vec<FastIteration>,
    /// Level and center at which the descent halted, if it did.
    pub halt: Option<(i32, PointId)>,
    /// `Σ wt(r) d(r, y)` over the representatives at the halting level.
    pub near_sum_at_halt: Option<f64>,
}

struct Descent {
    level: i32,
    y: PointId,
    exhausted: bool,
}

/// Query points under the projected node `j`.
fn leaves_under(proj: &ProjectedTree, j: u32, out: &mut Vec<PointId>) {
    let mut stack = vec![j];
    while let Some(u) = stack.pop() {
        let node = proj.node(u);
        if node.level == 0 {
            out.push(node.point);
        }
        stack.extend_from_slice(proj.children(u));
    }
}

fn descend(
    index: &NetIndex,
    proj: &ProjectedTree,
    params: &AlgoParams,
    n: f64,
    trace: &mut Trace,
    mut record: Option<&mut FastTrace>,
) -> Descent {
    let ps = index.points();
    let h = index.hierarchy();
    let list_c = params.list_c as f64;
    let root_level = proj.root_level();
    let mut y = proj.node(proj.root()).point;
    let mut reps = vec![proj.root_unode()];
    let mut next: Vec<UNode> = Vec::new();
    let mut points: Vec<(PointId, f64)> = Vec::new();
    let mut summ = 0.0f64;
    let mut far: Vec<PointId> = Vec::new();
    for i in (0..root_level).rev() {
        next.clear();
        let mut skipped = 0u64;
        for &r in &reps {
            let p = proj.unode_point(index, r);
            let d = ps.distance(p, y);
            if d > params.c_prime * pow2(i) {
                let wt = proj.unode_weight(r);
                summ += wt as f64 * d;
                skipped += wt as u64;
                if record.is_some() {
                    leaves_under(proj, r.proj, &mut far);
                }
            } else {
                proj.children_uncompacted(index, r, &mut next);
            }
        }
        std::mem::swap(&mut reps, &mut next);
        trace.reps_history.push(reps.len());
        points.clear();
        points.extend(
            reps.iter()
                .map(|&r| (proj.unode_point(index, r), proj.unode_weight(r) as f64)),
        );
        let cost = |z: PointId| -> f64 { points.iter().map(|&(p, w)| w * ps.distance(p, z)).sum() };
        let (y_hat, best) =
            argmin(h.list_iter(ps, y, i, list_c), cost).expect("a list holds its own point");
        let halted = summ + best > params.alpha * n * pow2(i - 1);
        if let Some(rec) = record.as_deref_mut() {
            far.sort_unstable();
            rec.iterations.push(FastIteration {
                level: i,
                y,
                reps: reps
                    .iter()
                    .map(|&r| (proj.unode_point(index, r), proj.unode_weight(r)))
                    .collect(),
                skipped_weight: skipped,
                summ,
                far: far.clone(),
            });
            if halted {
                rec.halt = Some((i, y));
                rec.near_sum_at_halt = Some(cost(y));
            }
        }
        if halted {
            return Descent {
                level: i,
                y,
                exhausted: false,
            };
        }
        y = y_hat;
    }
    Descent {
        level: 0,
        y,
        exhausted: true,
    }
}

fn fast(
    index: &NetIndex,
    q: &[PointId],
    params: &AlgoParams,
    record: Option<&mut FastTrace>,
) -> Result<ClusteringResult> {
    let ps = index.points();
    params.validate()?;
    if params.list_c > index.lists().c() {
        return Err(Error::ListRadiusTooLarge {
            requested: params.list_c,
            stored: index.lists().c(),
        });
    }
    let q = prepare_query(ps, q)?;
    if q.len() == 1 {
        return Ok(single_point(ps, q[0]));
    }
    let h = index.hierarchy();
    let n = q.len() as f64;
    let proj = index.project(&q)?;
    let mut trace = Trace::default();
    let mut record = record;
    if let Some(rec) = record.as_deref_mut() {
        rec.n = q.len();
        rec.root_level = proj.root_level();
    }
    let descent = descend(index, &proj, params, n, &mut trace, record);
    let (i_fin, y) = (descent.level, descent.y);
    trace.final_level = Some(i_fin);
    trace.exhausted = descent.exhausted;

    let eps_pp = params.eps_double_prime();
    let far_radius = 3.0 * params.c / (2.0 * params.eps_prime()) * pow2(i_fin);
    let near: Vec<PointId> = q
        .iter()
        .copied()
        .filter(|&p| ps.distance(p, y) <= far_radius)
        .collect();
    let weighted = if near.is_empty() {
        Vec::new()
    } else {
        proj.representatives_at(&near, i_fin - halvings(eps_pp))?
            .weighted()
    };
    trace.representatives = weighted.len();

    let seeds: Vec<PointId> = h.list_iter(ps, y, i_fin, params.list_c as f64).collect();
    let mut candidates = h.descendants_search_many(ps, &seeds, i_fin - 1, eps_pp)?;
    if let Err(pos) = candidates.binary_search(&y) {
        candidates.insert(pos, y);
    }
    trace.candidates = candidates.len();
    let (best, _) = argmin(candidates, |z| {
        weighted
            .iter()
            .map(|w| w.weight as f64 * ps.distance(w.point, z))
            .sum::<f64>()
    })
    .expect("candidates are nonempty");
    let cost = median_cost(ps, &q, best);
    Ok(ClusteringResult::new(ps, vec![best], cost, trace))
}

/// 1-median by descending the projected tree `T|Q`.
///
/// Representatives far from the current center are retired into a running
/// sum; the rest are expanded level by level. After the descent halts, far
/// query points are dropped, near ones are merged into weighted
/// representatives, and candidates from descendants searches around the
/// halting center are ranked by weighted cost. The reported objective is the
/// exact cost of the chosen center on `q`.
pub fn one_median_fast(
    index: &NetIndex,
    q: &[PointId],
    params: &AlgoParams,
) -> Result<ClusteringResult> {
    fast(index, q, params, None)
}

/// [`one_median_fast`] that also returns a per-iteration record.
pub fn one_median_fast_traced(
    index: &NetIndex,
    q: &[PointId],
    params: &AlgoParams,
) -> Result<(ClusteringResult, FastTrace)> {
    let mut record = FastTrace {
        n: 0,
        root_level: 0,
        iterations: Vec::new(),
        halt: None,
        near_sum_at_halt: None,
    };
    let result = fast(index, q, params, Some(&mut record))?;
    Ok((result, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;

    fn line(xs: &[f64]) -> NetIndex {
        let ps = PointSet::from_coords(1, xs.to_vec(), Norm::L2).unwrap();
        NetIndex::build(ps, 8).unwrap()
    }

    fn ids(v: &[u32]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    #[test]
    fn four_point_line() {
        let idx = line(&[0.0, 1.0, 2.0, 4.0]);
        let q = ids(&[0, 1, 2, 3]);
        for eps in [0.5, 0.25, 0.1] {
            let r = one_median_simple(&idx, &q, eps).unwrap();
            assert!(r.objective <= (1.0 + eps) * 5.0);
            let r = one_median_fast(&idx, &q, &AlgoParams::new(eps).unwrap()).unwrap();
            assert!(r.objective <= (1.0 + eps) * 5.0);
        }
        let two = ids(&[0, 3]);
        let r = one_median_simple(&idx, &two, 0.5).unwrap();
        assert_eq!(r.objective, 4.0);
    }

    #[test]
    fn singleton_query_is_exact() {
        let idx = line(&[0.0, 1.0, 2.0, 4.0]);
        let r = one_median_simple(&idx, &ids(&[2]), 0.5).unwrap();
        assert_eq!((r.centers.clone(), r.objective), (ids(&[2]), 0.0));
        let r = one_median_fast(&idx, &ids(&[3, 3]), &AlgoParams::new(0.5).unwrap()).unwrap();
        assert_eq!((r.centers, r.objective), (ids(&[3]), 0.0));
    }

    #[test]
    fn objective_matches_centers() {
        let xs: Vec<f64> = (0..40)
            .map(|i| (i * i % 37) as f64 + i as f64 * 40.0)
            .collect();
        let idx = line(&xs);
        let q = ids(&[1, 5, 9, 13, 30, 31, 39]);
        let r = one_median_fast(&idx, &q, &AlgoParams::new(0.25).unwrap()).unwrap();
        let check = super::super::evaluate_median(idx.points(), &q, &r.centers).unwrap();
        assert!((r.objective - check).abs() <= 1e-9 * check.max(1.0));
        assert_eq!(r.objective_original, idx.points().to_original(r.objective));
    }

    #[test]
    fn traced_run_agrees_with_plain_run() {
        let xs: Vec<f64> = (0..64).map(|i| (i as f64).powf(1.7)).collect();
        let idx = line(&xs);
        let q: Vec<PointId> = (0..64).step_by(3).map(PointId).collect();
        let params = AlgoParams::new(0.5).unwrap();
        let plain = one_median_fast(&idx, &q, &params).unwrap();
        let (traced, record) = one_median_fast_traced(&idx, &q, &params).unwrap();
        assert_eq!(plain, traced);
        assert_eq!(record.n, q.len());
        assert_eq!(record.iterations.len(), traced.trace.reps_history.len());
    }
}
