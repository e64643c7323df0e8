//! The query-ready index: a point set, its hierarchy and navigation tables.

use crate::error::Result;
use crate::hierarchy::{
    BuildStrategy, CList, CListStore, HierarchyTree, NetHierarchy, NetLevels, NodeId,
};
use crate::metric::{PointId, PointSet};
use crate::navigation::Navigation;
use crate::projection::ProjectedTree;

/// Preprocessed metric, immutable after construction and shareable across
/// threads.
#[derive(Clone, Debug, PartialEq)]
pub struct NetIndex {
    pub(crate) points: PointSet,
    pub(crate) hierarchy: NetHierarchy,
    pub(crate) nav: Navigation,
}

impl NetIndex {
    pub fn build(points: PointSet, c: u32) -> Result<Self> {
        Self::build_with(points, c, BuildStrategy::Indexed)
    }

    pub fn build_with(points: PointSet, c: u32, strategy: BuildStrategy) -> Result<Self> {
        let hierarchy = NetHierarchy::build_with(&points, c, strategy)?;
        Ok(Self::from_parts(points, hierarchy))
    }

    pub(crate) fn from_parts(points: PointSet, hierarchy: NetHierarchy) -> Self {
        let nav = Navigation::build(&hierarchy.tree);
        NetIndex {
            points,
            hierarchy,
            nav,
        }
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn hierarchy(&self) -> &NetHierarchy {
        &self.hierarchy
    }

    pub fn nets(&self) -> &NetLevels {
        &self.hierarchy.nets
    }

    pub fn tree(&self) -> &HierarchyTree {
        &self.hierarchy.tree
    }

    pub fn lists(&self) -> &CListStore {
        &self.hierarchy.lists
    }

    pub fn navigation(&self) -> &Navigation {
        &self.nav
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn i_top(&self) -> i32 {
        self.hierarchy.nets.i_top
    }

    /// Root point `y_top`.
    pub fn top_point(&self) -> PointId {
        self.tree().node(self.tree().root()).point
    }

    #[inline]
    pub fn distance(&self, a: PointId, b: PointId) -> f64 {
        self.points.distance(a, b)
    }

    pub fn c_list(&self, y: PointId, i: i32, c_query: u32) -> Result<CList<'_>> {
        self.hierarchy.c_list(&self.points, y, i, c_query)
    }

    pub fn descendants_search(&self, y: PointId, i: i32, eps: f64) -> Result<Vec<PointId>> {
        self.hierarchy.descendants_search(&self.points, y, i, eps)
    }

    pub fn descendants_search_many(
        &self,
        seeds: &[PointId],
        i: i32,
        eps: f64,
    ) -> Result<Vec<PointId>> {
        self.hierarchy
            .descendants_search_many(&self.points, seeds, i, eps)
    }

    pub fn is_c_list_descendant(&self, y: PointId, i: i32, x: PointId, j: i32) -> Result<bool> {
        self.hierarchy
            .is_c_list_descendant(&self.points, y, i, x, j)
    }

    pub fn recursive_scan(&self, y: PointId, i: i32, j: i32) -> Result<Vec<PointId>> {
        self.hierarchy.recursive_scan(&self.points, y, i, j)
    }

    pub fn lca(&self, u: NodeId, v: NodeId) -> NodeId {
        self.nav.lca(u, v)
    }

    pub fn level_ancestor(&self, q: PointId, i: i32) -> Result<(PointId, NodeId)> {
        self.nav.level_ancestor(&self.hierarchy.tree, q, i)
    }

    pub fn dfs_rank(&self, q: PointId) -> u32 {
        self.nav.dfs_rank(q)
    }

    /// Builds the compacted projection `T|Q`.
    pub fn project(&self, q: &[PointId]) -> Result<ProjectedTree> {
        ProjectedTree::build(self, q)
    }
}
