//! p-median queries through a coreset and a centroid set built from
//! exponential grids.

use super::center::gonzalez;
use super::subsets::{best_subset, Aggregate};
use super::{ceil_log2, prepare_query, AlgoParams, ClusteringResult, Trace};
use crate::error::{Error, Result};
use crate::hierarchy::check_eps;
use crate::index::NetIndex;
use crate::metric::{PointId, WeightedPoint};

/// Multiplier on `p ceil(log2 n)` for the size of the seed set.
const SEED_FACTOR: usize = 4;

/// Weighted summary of a query set; total weight equals the number of
/// distinct query points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coreset {
    /// Weighted points in ascending id order.
    pub points: Vec<WeightedPoint>,
}

impl Coreset {
    pub fn total_weight(&self) -> u64 {
        self.points.iter().map(|w| w.weight).sum()
    }
}

/// Points around `r` whose density falls off with distance.
///
/// For `j = 0..=levels` a descendants search with refinement `eps` is run at
/// level `l_j = ceil(log2 R) + j`, clipped to `0..=i_top`, from the list of
/// `r`'s ancestor one level up. Every point within `2^(l_j)` of `r` then has
/// a returned point within `eps 2^(l_j)`. The result contains `r` and is
/// sorted by id.
pub fn exponential_grid(
    index: &NetIndex,
    r: PointId,
    radius: f64,
    eps: f64,
    levels: u32,
) -> Result<Vec<PointId>> {
    index.points().check(r)?;
    check_eps(eps)?;
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "grid radius {radius} must be positive"
        )));
    }
    let ps = index.points();
    let h = index.hierarchy();
    let top = index.i_top();
    let base = ceil_log2(radius);
    let mut out = vec![r];
    let mut last = None;
    for j in 0..=levels as i32 {
        let l = (base + j).clamp(0, top);
        if last == Some(l) {
            continue;
        }
        last = Some(l);
        if l < top {
            let (anc, _) = index.level_ancestor(r, l + 1)?;
            let seeds: Vec<PointId> = h
                .list_iter(ps, anc, l + 1, crate::hierarchy::SCAN_C as f64)
                .collect();
            out.extend(h.descendants_search_many(ps, &seeds, l, eps)?);
        } else {
            out.extend(h.descendants_search(ps, index.top_point(), top, eps)?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Closest point of `grid` to `x`, ties to the smallest id.
fn snap(index: &NetIndex, x: PointId, grid: &[PointId]) -> PointId {
    let mut best = (f64::INFINITY, x);
    for &g in grid {
        let d = index.distance(x, g);
        if d < best.0 || (d == best.0 && g < best.1) {
            best = (d, g);
        }
    }
    best.1
}

struct Summary {
    coreset: Vec<WeightedPoint>,
    /// Grid radius of each coreset point: the smallest among the anchors
    /// whose grids it was snapped from.
    radius: Vec<f64>,
    seed_size: usize,
    levels: u32,
}

/// Seeds, assigns and snaps a prepared query with `p < n`.
fn summarize(index: &NetIndex, q: &[PointId], p: usize, eps_grid: f64) -> Result<Summary> {
    let ps = index.points();
    let n = q.len();
    let log_n = ceil_log2(n as f64) as usize;
    let seed_size = n.min((SEED_FACTOR * p * log_n).max(p));
    let (anchors, _) = gonzalez(ps, q, seed_size)?;

    let mut owner = Vec::with_capacity(n);
    let mut reach = vec![0.0f64; anchors.len()];
    for &x in q {
        let mut best = (f64::INFINITY, PointId(u32::MAX), 0usize);
        for (a, &anchor) in anchors.iter().enumerate() {
            let d = ps.distance(x, anchor);
            if d < best.0 || (d == best.0 && anchor < best.1) {
                best = (d, anchor, a);
            }
        }
        owner.push(best.2);
        reach[best.2] = reach[best.2].max(best.0);
    }

    let levels = (log_n + 2) as u32;
    let scale = 2.0f64.powi(levels as i32);
    let grid_radius: Vec<f64> = reach.iter().map(|&r| (r / scale).max(1.0)).collect();
    let mut grids: Vec<Option<Vec<PointId>>> = vec![None; anchors.len()];
    let mut snapped: Vec<(PointId, f64)> = Vec::with_capacity(n);
    for (&x, &a) in q.iter().zip(&owner) {
        if grids[a].is_none() {
            grids[a] = Some(exponential_grid(
                index,
                anchors[a],
                grid_radius[a],
                eps_grid,
                levels,
            )?);
        }
        snapped.push((snap(index, x, grids[a].as_deref().unwrap()), grid_radius[a]));
    }
    snapped.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut coreset: Vec<WeightedPoint> = Vec::new();
    let mut radius: Vec<f64> = Vec::new();
    for &(s, r) in &snapped {
        match coreset.last_mut() {
            Some(w) if w.point == s => w.weight += 1,
            _ => {
                coreset.push(WeightedPoint {
                    point: s,
                    weight: 1,
                });
                radius.push(r);
            }
        }
    }
    Ok(Summary {
        coreset,
        radius,
        seed_size: anchors.len(),
        levels,
    })
}

/// p-median query.
///
/// A Gonzalez seed of size `4 p ceil(log2 n)` anchors the query; every query
/// point snaps to the nearest point of an exponential grid around its
/// anchor, giving a weighted coreset. Grids around the coreset points form
/// the candidate centers, and the best `p`-subset for the coreset is
/// returned. Grid refinement is `eps / 4` in both stages.
pub fn p_median(
    index: &NetIndex,
    q: &[PointId],
    p: usize,
    params: &AlgoParams,
) -> Result<ClusteringResult> {
    let ps = index.points();
    params.validate()?;
    if p == 0 {
        return Err(Error::InvalidParams("p must be at least 1".into()));
    }
    let q = prepare_query(ps, q)?;
    if p >= q.len() {
        let trace = Trace {
            candidates: q.len(),
            ..Trace::default()
        };
        return Ok(ClusteringResult::new(ps, q, 0.0, trace));
    }
    let eps_grid = params.eps / 4.0;
    let summary = summarize(index, &q, p, eps_grid)?;
    let mut trace = Trace {
        seed_size: summary.seed_size,
        coreset_size: summary.coreset.len(),
        representatives: summary.coreset.len(),
        ..Trace::default()
    };
    let mut candidates: Vec<PointId> = Vec::new();
    for (w, &r) in summary.coreset.iter().zip(&summary.radius) {
        candidates.extend(exponential_grid(
            index,
            w.point,
            r,
            eps_grid,
            summary.levels,
        )?);
    }
    candidates.sort_unstable();
    candidates.dedup();
    trace.candidates = candidates.len();

    let (centers, _) = best_subset(ps, &summary.coreset, &candidates, p, Aggregate::Sum)?;
    let cost = super::evaluate_median(ps, &q, &centers)?;
    Ok(ClusteringResult::new(ps, centers, cost, trace))
}

/// The coreset [`p_median`] builds for `q`. With `p` at least the number of
/// distinct query points it is `q` itself with unit weights.
pub fn build_coreset(index: &NetIndex, q: &[PointId], p: usize, eps: f64) -> Result<Coreset> {
    check_eps(eps)?;
    if p == 0 {
        return Err(Error::InvalidParams("p must be at least 1".into()));
    }
    let q = prepare_query(index.points(), q)?;
    if p >= q.len() {
        return Ok(Coreset {
            points: q
                .iter()
                .map(|&x| WeightedPoint {
                    point: x,
                    weight: 1,
                })
                .collect(),
        });
    }
    let summary = summarize(index, &q, p, eps / 4.0)?;
    Ok(Coreset {
        points: summary.coreset,
    })
}
