//! Clustering objectives.

use crate::error::{Error, Result};
use crate::metric::{PointId, PointSet, WeightedPoint};

#[inline]
pub(crate) fn nearest(ps: &PointSet, p: PointId, centers: &[PointId]) -> f64 {
    centers
        .iter()
        .map(|&c| ps.distance(p, c))
        .fold(f64::INFINITY, f64::min)
}

/// The candidate of least cost, ties broken by smallest id. `None` for an
/// empty candidate sequence.
pub(crate) fn argmin<I, F>(candidates: I, mut cost: F) -> Option<(PointId, f64)>
where
    I: IntoIterator<Item = PointId>,
    F: FnMut(PointId) -> f64,
{
    let mut best: Option<(PointId, f64)> = None;
    for z in candidates {
        let c = cost(z);
        match best {
            Some((bz, bc)) if c > bc || (c == bc && z >= bz) => {}
            _ => best = Some((z, c)),
        }
    }
    best
}

fn check(centers: &[PointId]) -> Result<()> {
    if centers.is_empty() {
        Err(Error::InvalidParams("center set is empty".into()))
    } else {
        Ok(())
    }
}

/// `Σ_q d(q, C)` over a query set.
pub fn evaluate_median(ps: &PointSet, q: &[PointId], centers: &[PointId]) -> Result<f64> {
    check(centers)?;
    Ok(q.iter().map(|&p| nearest(ps, p, centers)).sum())
}

/// `max_q d(q, C)` over a query set.
pub fn evaluate_center(ps: &PointSet, q: &[PointId], centers: &[PointId]) -> Result<f64> {
    check(centers)?;
    Ok(q.iter()
        .map(|&p| nearest(ps, p, centers))
        .fold(0.0, f64::max))
}

/// `Σ wt(q) d(q, C)` over weighted points.
pub fn evaluate_median_weighted(
    ps: &PointSet,
    q: &[WeightedPoint],
    centers: &[PointId],
) -> Result<f64> {
    check(centers)?;
    Ok(q.iter()
        .map(|w| w.weight as f64 * nearest(ps, w.point, centers))
        .sum())
}

/// `max d(q, C)` over weighted points with positive weight.
pub fn evaluate_center_weighted(
    ps: &PointSet,
    q: &[WeightedPoint],
    centers: &[PointId],
) -> Result<f64> {
    check(centers)?;
    Ok(q.iter()
        .filter(|w| w.weight > 0)
        .map(|w| nearest(ps, w.point, centers))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;

    fn ids(v: &[u32]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    #[test]
    fn objectives_on_small_line() {
        let ps = PointSet::from_coords(1, vec![0.0, 1.0, 2.0, 4.0], Norm::L2).unwrap();
        let q = ids(&[0, 1, 2, 3]);
        assert_eq!(evaluate_median(&ps, &q, &ids(&[2])).unwrap(), 5.0);
        assert_eq!(evaluate_center(&ps, &q, &ids(&[2])).unwrap(), 2.0);
        assert_eq!(evaluate_median(&ps, &q, &q).unwrap(), 0.0);
        assert_eq!(
            evaluate_center(&ps, &ids(&[0, 3]), &ids(&[0, 3])).unwrap(),
            0.0
        );
        let w = [
            WeightedPoint {
                point: PointId(0),
                weight: 2,
            },
            WeightedPoint {
                point: PointId(3),
                weight: 1,
            },
        ];
        assert_eq!(evaluate_median_weighted(&ps, &w, &ids(&[0])).unwrap(), 4.0);
        assert!(evaluate_median(&ps, &q, &[]).is_err());
    }
}
