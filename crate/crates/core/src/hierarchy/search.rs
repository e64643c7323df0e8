//! List filtering, recursive scans and descendants searches.

use super::{NetHierarchy, SCAN_C};
use crate::error::{Error, Result};
use crate::metric::{PointId, PointSet};

/// Iterator over a filtered c-list, in (distance, id) order.
pub enum CList<'a> {
    Trivial(Option<PointId>),
    Stored {
        ps: &'a PointSet,
        y: usize,
        radius: f64,
        rest: std::slice::Iter<'a, u32>,
    },
}

impl Iterator for CList<'_> {
    type Item = PointId;

    #[inline]
    fn next(&mut self) -> Option<PointId> {
        match self {
            CList::Trivial(p) => p.take(),
            CList::Stored {
                ps,
                y,
                radius,
                rest,
            } => {
                let &z = rest.next()?;
                if ps.dist_idx(*y, z as usize) <= *radius {
                    Some(PointId(z))
                } else {
                    *rest = [].iter();
                    None
                }
            }
        }
    }
}

/// Number of halvings needed to reach `eps`: the smallest `k` with `2^-k <= eps`.
pub(crate) fn halvings(eps: f64) -> i32 {
    let mut k = 0;
    let mut r = 1.0f64;
    while r > eps {
        r *= 0.5;
        k += 1;
    }
    k
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidEps(eps))
    }
}

/// Level at which a descendants search from level `i` with refinement `eps`
/// stops. One level past `i - log(1/eps)`, so the proxy found for a point
/// within `2^i` is within `eps * 2^i` rather than `2 * eps * 2^i`.
pub(crate) fn stop_level(i: i32, eps: f64) -> i32 {
    if i >= 1 {
        (i - halvings(eps) - 1).max(0)
    } else {
        i - 1
    }
}

impl NetHierarchy {
    fn check_member(&self, ps: &PointSet, y: PointId, i: i32) -> Result<()> {
        ps.check(y)?;
        if i > self.nets.i_top {
            return Err(Error::InvalidLevel {
                level: i,
                top: self.nets.i_top,
            });
        }
        if !self.nets.contains(y, i) {
            return Err(Error::NotInNet { point: y, level: i });
        }
        Ok(())
    }

    /// Unchecked filtered list `{z ∈ Y_{i-1} : d(y,z) <= c_query * 2^i}`.
    #[inline]
    pub(crate) fn list_iter<'a>(
        &'a self,
        ps: &'a PointSet,
        y: PointId,
        i: i32,
        c_query: f64,
    ) -> CList<'a> {
        let stored = self.lists.stored(y, i.max(0));
        if stored.is_empty() {
            return CList::Trivial(Some(y));
        }
        CList::Stored {
            ps,
            y: y.index(),
            radius: c_query * (2.0f64).powi(i),
            rest: stored.iter(),
        }
    }

    /// `L_{y,i,c_query}` filtered from the stored lists, in (distance, id)
    /// order. Levels `i <= 0` filter the level-0 list.
    pub fn c_list<'a>(
        &'a self,
        ps: &'a PointSet,
        y: PointId,
        i: i32,
        c_query: u32,
    ) -> Result<CList<'a>> {
        self.check_member(ps, y, i)?;
        if c_query == 0 || c_query > self.lists.c {
            return Err(Error::ListRadiusTooLarge {
                requested: c_query,
                stored: self.lists.c,
            });
        }
        Ok(self.list_iter(ps, y, i, c_query as f64))
    }

    /// Points of `Y_stop` reached from `y ∈ Y_i` by a recursive scan of
    /// `c`-lists, sorted by id.
    pub(crate) fn scan_to(
        &self,
        ps: &PointSet,
        seeds: &[PointId],
        i: i32,
        stop: i32,
        c: f64,
    ) -> Vec<PointId> {
        self.scan_to_filtered(ps, seeds, i, stop, c, |_, _| true)
    }

    /// [`Self::scan_to`] dropping every frontier point `u` of level `l` with
    /// `keep(u, l) == false`, seeds included.
    pub(crate) fn scan_to_filtered(
        &self,
        ps: &PointSet,
        seeds: &[PointId],
        i: i32,
        stop: i32,
        c: f64,
        mut keep: impl FnMut(PointId, i32) -> bool,
    ) -> Vec<PointId> {
        let mut frontier: Vec<PointId> = seeds.iter().copied().filter(|&u| keep(u, i)).collect();
        frontier.sort_unstable();
        frontier.dedup();
        let mut next = Vec::new();
        for level in ((stop + 1)..=i).rev() {
            next.clear();
            for &u in &frontier {
                next.extend(self.list_iter(ps, u, level, c));
            }
            next.sort_unstable();
            next.dedup();
            next.retain(|&u| keep(u, level - 1));
            std::mem::swap(&mut frontier, &mut next);
        }
        frontier
    }

    /// Descendants search with refinement `eps` from `y ∈ Y_i`.
    ///
    /// Returns the points of the stop level reached by the recursive scan,
    /// sorted by id. For every `x` with `d(x,y) <= 2^(i+1)` some returned `x'`
    /// satisfies `d(x,x') <= eps * 2^i`.
    pub fn descendants_search(
        &self,
        ps: &PointSet,
        y: PointId,
        i: i32,
        eps: f64,
    ) -> Result<Vec<PointId>> {
        self.check_member(ps, y, i)?;
        check_eps(eps)?;
        Ok(self.scan_to(ps, &[y], i, stop_level(i, eps), SCAN_C as f64))
    }

    /// Descendants search from several starting points of the same level,
    /// with duplicates removed across starts.
    pub fn descendants_search_many(
        &self,
        ps: &PointSet,
        seeds: &[PointId],
        i: i32,
        eps: f64,
    ) -> Result<Vec<PointId>> {
        for &y in seeds {
            self.check_member(ps, y, i)?;
        }
        check_eps(eps)?;
        Ok(self.scan_to(ps, seeds, i, stop_level(i, eps), SCAN_C as f64))
    }

    /// Whether `x ∈ Y_j` is reached from `y ∈ Y_i` by a recursive scan of the
    /// full stored lists.
    pub fn is_c_list_descendant(
        &self,
        ps: &PointSet,
        y: PointId,
        i: i32,
        x: PointId,
        j: i32,
    ) -> Result<bool> {
        self.check_member(ps, y, i)?;
        self.check_member(ps, x, j)?;
        if j >= i {
            return Ok(false);
        }
        let reached = self.scan_to(ps, &[y], i, j, self.lists.c as f64);
        Ok(reached.binary_search(&x).is_ok())
    }

    /// Every point of `Y_j` reached from `y ∈ Y_i` by a recursive scan of the
    /// full stored lists.
    pub fn recursive_scan(
        &self,
        ps: &PointSet,
        y: PointId,
        i: i32,
        j: i32,
    ) -> Result<Vec<PointId>> {
        self.check_member(ps, y, i)?;
        Ok(self.scan_to(ps, &[y], i, j.min(i), self.lists.c as f64))
    }
}
