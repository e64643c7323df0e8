//! Net-hierarchy index over a finite metric space with approximate
//! 1-median, p-median, 1-center and p-center queries on subsets.

pub mod clustering;
pub mod corpus;
pub mod error;
pub mod hierarchy;
pub mod index;
pub mod metric;
pub mod navigation;
pub mod oracle;
pub mod persist;
pub mod projection;
mod vptree;

pub use clustering::{AlgoParams, ClusteringResult, Coreset, Trace};
pub use corpus::CorpusKind;
pub use error::{Error, Result};
pub use hierarchy::{
    BuildStrategy, CListStore, HierarchyTree, NetHierarchy, NetLevels, NodeId, TreeNode,
};
pub use index::NetIndex;
pub use metric::{load_points, InputFormat, MetricStats, Norm, PointId, PointSet, WeightedPoint};
pub use navigation::Navigation;
pub use projection::{ProjNode, ProjectedTree, Representative, RepresentativeSet, UNode};
