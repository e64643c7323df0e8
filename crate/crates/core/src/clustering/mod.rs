//! Approximate clustering queries on subsets of an indexed metric.

mod center;
mod median;
mod objective;
mod pmedian;
mod subsets;

pub use center::{gonzalez, one_center, p_center};
pub use median::{
    one_median_fast, one_median_fast_traced, one_median_simple, FastIteration, FastTrace,
};
pub use objective::{
    evaluate_center, evaluate_center_weighted, evaluate_median, evaluate_median_weighted,
};
pub use pmedian::{build_coreset, exponential_grid, p_median, Coreset};
pub use subsets::MAX_SUBSET_COMBINATIONS;

use crate::error::{Error, Result};
use crate::hierarchy::DEFAULT_LIST_C;
use crate::metric::{PointId, PointSet};

/// Constants of the query algorithms.
///
/// `c` is the analysis constant bounding how far the optimum can drift from
/// the current center; `list_c` is the radius of the lists actually scanned.
/// `beta = (4 + 2 list_c) / c_prime` must stay below 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgoParams {
    pub eps: f64,
    pub alpha: f64,
    pub c: f64,
    pub list_c: u32,
    pub c_prime: f64,
}

impl AlgoParams {
    /// Defaults: `alpha = 16`, `c = 60`, `list_c = 8`, `c_prime = 80`
    /// (so `beta = 1/4`).
    pub fn new(eps: f64) -> Result<Self> {
        let params = AlgoParams {
            eps,
            alpha: 16.0,
            c: 60.0,
            list_c: DEFAULT_LIST_C,
            c_prime: 80.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Scans lists with the analysis constant itself (`list_c = 60`,
    /// `c_prime = 496`, again `beta = 1/4`). Requires an index built with
    /// `c >= 60`.
    pub fn strict(eps: f64) -> Result<Self> {
        let params = AlgoParams {
            eps,
            alpha: 16.0,
            c: 60.0,
            list_c: 60,
            c_prime: 496.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn beta(&self) -> f64 {
        (4.0 + 2.0 * self.list_c as f64) / self.c_prime
    }

    /// Far-point slack of the refinement, `eps / (eps + 2)`.
    pub fn eps_prime(&self) -> f64 {
        self.eps / (self.eps + 2.0)
    }

    /// Representative resolution of the refinement,
    /// `(alpha/2 - 3)(1 - beta) eps / 2`, capped at 1/2.
    pub fn eps_double_prime(&self) -> f64 {
        ((self.alpha / 2.0 - 3.0) * (1.0 - self.beta()) * self.eps / 2.0).min(0.5)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 0.5) {
            return Err(Error::InvalidEps(self.eps));
        }
        let beta = self.beta();
        let bad = |what: String| Err(Error::InvalidParams(what));
        if !(beta > 0.0 && beta < 1.0) {
            return bad(format!("beta = {beta} must lie in (0, 1)"));
        }
        if self.alpha <= 6.0 {
            return bad(format!("alpha = {} must exceed 6", self.alpha));
        }
        let need = 5.0 + 2.0 * (1.0 + beta) * (self.alpha + 2.0);
        if self.c < need {
            return bad(format!(
                "c = {} is below 5 + 2(1+beta)(alpha+2) = {need}",
                self.c
            ));
        }
        if self.list_c < crate::hierarchy::MIN_LIST_C {
            return bad(format!("list_c = {} is below 7", self.list_c));
        }
        Ok(())
    }
}

/// Refinement constant of the center queries: the largest power of two not
/// above `eps / 24`.
pub fn center_eps_prime(eps: f64) -> f64 {
    let mut e = 1.0f64;
    while e > eps / 24.0 {
        e *= 0.5;
    }
    e
}

/// Diagnostics of one query.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    /// Level at which the descent halted (the refinement level).
    pub final_level: Option<i32>,
    /// The descent ran through level 0 without halting.
    pub exhausted: bool,
    /// Sizes of the representative sets per descent iteration.
    pub reps_history: Vec<usize>,
    /// Number of candidate centers evaluated in the refinement.
    pub candidates: usize,
    /// Number of weighted representatives used in the refinement.
    pub representatives: usize,
    /// Size of the seed set (Gonzalez centers) where one is used.
    pub seed_size: usize,
    /// Size of the p-median coreset.
    pub coreset_size: usize,
}

/// Centers chosen by a query and their cost on the query set.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringResult {
    /// Chosen centers in ascending id order.
    pub centers: Vec<PointId>,
    /// Objective on the query set, in normalized units.
    pub objective: f64,
    /// Objective converted back to the input's units.
    pub objective_original: f64,
    pub trace: Trace,
}

impl ClusteringResult {
    pub(crate) fn new(
        ps: &PointSet,
        mut centers: Vec<PointId>,
        objective: f64,
        trace: Trace,
    ) -> Self {
        centers.sort_unstable();
        centers.dedup();
        ClusteringResult {
            centers,
            objective,
            objective_original: ps.to_original(objective),
            trace,
        }
    }
}

/// Sorted, deduplicated copy of a query, validated against the point set.
pub(crate) fn prepare_query(ps: &PointSet, q: &[PointId]) -> Result<Vec<PointId>> {
    if q.is_empty() {
        return Err(Error::EmptyQuery);
    }
    for &p in q {
        ps.check(p)?;
    }
    let mut q = q.to_vec();
    q.sort_unstable();
    q.dedup();
    Ok(q)
}

/// Smallest `k >= 0` with `2^k >= x`.
pub(crate) fn ceil_log2(x: f64) -> i32 {
    let mut k = 0;
    let mut r = 1.0f64;
    while r < x {
        r *= 2.0;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_constants_satisfy_the_ledger() {
        let p = AlgoParams::new(0.5).unwrap();
        assert_eq!(p.beta(), 0.25);
        assert_eq!(p.eps_prime(), 0.2);
        assert_eq!(p.eps_double_prime(), 0.5);
        let p = AlgoParams::new(0.1).unwrap();
        assert!((p.eps_double_prime() - 0.1875).abs() < 1e-12);
        assert_eq!(AlgoParams::strict(0.25).unwrap().beta(), 0.25);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(AlgoParams::new(0.0), Err(Error::InvalidEps(_))));
        assert!(matches!(AlgoParams::new(0.75), Err(Error::InvalidEps(_))));
        let mut p = AlgoParams::new(0.5).unwrap();
        p.c_prime = 20.0;
        assert!(p.validate().is_err());
        let mut p = AlgoParams::new(0.5).unwrap();
        p.c = 40.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn center_refinement_is_a_power_of_two_in_range() {
        for &eps in &[0.5, 0.3, 0.25, 0.1, 0.01] {
            let e = center_eps_prime(eps);
            assert!(e >= eps / 48.0 && e <= eps / 24.0);
            assert_eq!(e.log2().fract(), 0.0);
        }
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1.0), 0);
        assert_eq!(ceil_log2(2.0), 1);
        assert_eq!(ceil_log2(2.5), 2);
        assert_eq!(ceil_log2(0.3), 0);
    }
}
