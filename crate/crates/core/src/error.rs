use std::io;

use crate::metric::PointId;

/// Everything that can go wrong while loading a metric, building an index or
/// answering a query.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("distance matrix is not symmetric at ({0}, {1})")]
    NonSymmetric(usize, usize),

    #[error("negative distance at ({0}, {1})")]
    NegativeDistance(usize, usize),

    #[error("nonzero self-distance for point {0}")]
    NonZeroDiagonal(usize),

    #[error("triangle inequality violated by points ({0}, {1}, {2})")]
    TriangleViolation(usize, usize, usize),

    #[error("points {0} and {1} are at distance zero")]
    DuplicatePoint(usize, usize),

    #[error("empty point set")]
    EmptyPointSet,

    #[error("point id {id} out of range (m = {m})")]
    InvalidPoint { id: usize, m: usize },

    #[error("level {level} out of range [0, {top}]")]
    InvalidLevel { level: i32, top: i32 },

    #[error("point {point} is not a member of net level {level}")]
    NotInNet { point: PointId, level: i32 },

    #[error("list radius constant {requested} exceeds the stored constant {stored}")]
    ListRadiusTooLarge { requested: u32, stored: u32 },

    #[error("metric statistics need at least two points")]
    DegenerateStats,

    #[error("query set is empty")]
    EmptyQuery,

    #[error("eps must lie in (0, 1/2], got {0}")]
    InvalidEps(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("exhaustive search over {combinations} subsets exceeds the limit of {limit}; lower p or raise eps")]
    TooManyCombinations { combinations: u128, limit: u128 },

    #[error("index container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
