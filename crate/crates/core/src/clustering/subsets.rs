//! Exhaustive search over `p`-subsets of a candidate set.

use crate::error::{Error, Result};
use crate::metric::{PointId, PointSet, WeightedPoint};

/// Largest number of `p`-subsets an exhaustive search will enumerate.
pub const MAX_SUBSET_COMBINATIONS: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Aggregate {
    Sum,
    Max,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = match acc.checked_mul((n - j) as u128) {
            Some(v) => v / (j as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub(crate) fn check_combinations(n: usize, p: usize) -> Result<()> {
    let combinations = binomial(n, p);
    if combinations > MAX_SUBSET_COMBINATIONS {
        return Err(Error::TooManyCombinations {
            combinations,
            limit: MAX_SUBSET_COMBINATIONS,
        });
    }
    Ok(())
}

struct Search<'a> {
    dm: &'a [f64],
    weights: Vec<f64>,
    n_cand: usize,
    p: usize,
    agg: Aggregate,
    best: f64,
    best_set: Vec<usize>,
    chosen: Vec<usize>,
    mins: Vec<Vec<f64>>,
}

impl Search<'_> {
    fn run(&mut self, start: usize, depth: usize) {
        let r = self.weights.len();
        for c in start..=(self.n_cand - (self.p - depth)) {
            let (prev, cur) = self.mins.split_at_mut(depth + 1);
            let prev = &prev[depth];
            let cur = &mut cur[0];
            for (j, slot) in cur.iter_mut().enumerate().take(r) {
                let d = self.dm[j * self.n_cand + c];
                *slot = if d < prev[j] { d } else { prev[j] };
            }
            self.chosen.push(c);
            if depth + 1 == self.p {
                let mut cost = 0.0f64;
                let mut over = false;
                for (&d, &w) in cur.iter().zip(&self.weights).take(r) {
                    match self.agg {
                        Aggregate::Sum => cost += w * d,
                        Aggregate::Max => cost = cost.max(d),
                    }
                    if cost >= self.best {
                        over = true;
                        break;
                    }
                }
                if !over {
                    self.best = cost;
                    self.best_set.clone_from(&self.chosen);
                }
            } else {
                self.run(c + 1, depth + 1);
            }
            self.chosen.pop();
        }
    }
}

/// The `p`-subset of `candidates` minimizing the aggregate of weighted
/// distances from `points` to the subset. Subsets are visited in
/// lexicographic order of candidate positions and only strict improvements
/// are kept, so ties go to the lexicographically first subset.
///
/// Points with weight 0 are ignored. Returns the subset and its cost.
pub(crate) fn best_subset(
    ps: &PointSet,
    points: &[WeightedPoint],
    candidates: &[PointId],
    p: usize,
    agg: Aggregate,
) -> Result<(Vec<PointId>, f64)> {
    if p == 0 {
        return Err(Error::InvalidParams("p must be at least 1".into()));
    }
    if candidates.is_empty() {
        return Err(Error::InvalidParams("no candidate centers".into()));
    }
    let p = p.min(candidates.len());
    check_combinations(candidates.len(), p)?;
    let pts: Vec<&WeightedPoint> = points.iter().filter(|w| w.weight > 0).collect();
    let n_cand = candidates.len();
    let mut dm = vec![0.0f64; pts.len() * n_cand];
    for (j, w) in pts.iter().enumerate() {
        for (c, &cand) in candidates.iter().enumerate() {
            dm[j * n_cand + c] = ps.distance(w.point, cand);
        }
    }
    let mut search = Search {
        dm: &dm,
        weights: pts.iter().map(|w| w.weight as f64).collect(),
        n_cand,
        p,
        agg,
        best: f64::INFINITY,
        best_set: (0..p).collect(),
        chosen: Vec::with_capacity(p),
        mins: vec![vec![f64::INFINITY; pts.len()]; p + 1],
    };
    search.run(0, 0);
    let best = if search.best.is_finite() {
        search.best
    } else {
        0.0
    };
    Ok((
        search.best_set.iter().map(|&c| candidates[c]).collect(),
        best,
    ))
}
