//! Seeded synthetic point sets. For a fixed seed, the first `k` points of a
//! corpus of size `m` are the corpus of size `k`, so families are nested.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::metric::{Norm, PointSet};

/// Synthetic corpus families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorpusKind {
    /// Points on a line with gaps drawn uniformly from {1, 2, 3}.
    Line,
    /// The integer lattice in square-spiral order around the origin.
    Grid2d,
    /// Planar Gaussian clusters, coordinates snapped to a 1e-3 lattice.
    GaussianMixture,
}

impl CorpusKind {
    pub const ALL: [CorpusKind; 3] = [
        CorpusKind::Line,
        CorpusKind::Grid2d,
        CorpusKind::GaussianMixture,
    ];

    pub fn dim(self) -> usize {
        match self {
            CorpusKind::Line => 1,
            CorpusKind::Grid2d | CorpusKind::GaussianMixture => 2,
        }
    }
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusKind::Line => "line",
            CorpusKind::Grid2d => "grid2d",
            CorpusKind::GaussianMixture => "gaussian-mixture",
        })
    }
}

impl FromStr for CorpusKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "line" => Ok(CorpusKind::Line),
            "grid2d" | "grid" => Ok(CorpusKind::Grid2d),
            "gaussian-mixture" | "gaussian" | "gmm" => Ok(CorpusKind::GaussianMixture),
            other => Err(format!(
                "unknown corpus {other:?} (expected line, grid2d or gaussian-mixture)"
            )),
        }
    }
}

/// Number of clusters in the Gaussian mixture.
const CLUSTERS: usize = 8;

fn line(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = 0.0;
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        if k == 1 {
            x += 1.0;
        } else if k > 1 {
            x += rng.gen_range(1..=3) as f64;
        }
        out.push(x);
    }
    out
}

fn spiral(m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m);
    let (mut x, mut y) = (0i64, 0i64);
    let dirs = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let (mut dir, mut run, mut left, mut turns) = (0usize, 1i64, 1i64, 0);
    for _ in 0..m {
        out.push(x as f64);
        out.push(y as f64);
        x += dirs[dir].0;
        y += dirs[dir].1;
        left -= 1;
        if left == 0 {
            dir = (dir + 1) % 4;
            turns += 1;
            if turns % 2 == 0 {
                run += 1;
            }
            left = run;
        }
    }
    out
}

fn gaussian(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let centers: Vec<(f64, f64, f64)> = (0..CLUSTERS)
        .map(|_| {
            (
                rng.gen_range(0.0..100.0),
                rng.gen_range(0.0..100.0),
                rng.gen_range(1.0..6.0),
            )
        })
        .collect();
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut seen = HashSet::with_capacity(m);
    let mut out = Vec::with_capacity(2 * m);
    while out.len() < 2 * m {
        let (cx, cy, s) = centers[rng.gen_range(0..CLUSTERS)];
        let x = ((cx + s * unit.sample(rng)) * 1000.0).round() as i64;
        let y = ((cy + s * unit.sample(rng)) * 1000.0).round() as i64;
        if seen.insert((x, y)) {
            out.push(x as f64 / 1000.0);
            out.push(y as f64 / 1000.0);
        }
    }
    out
}

/// Row-major coordinates of `m` points of a corpus.
pub fn coordinates(kind: CorpusKind, m: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        CorpusKind::Line => line(m, &mut rng),
        CorpusKind::Grid2d => spiral(m),
        CorpusKind::GaussianMixture => gaussian(m, &mut rng),
    }
}

/// `m` points of a corpus as a normalized point set under the L2 norm.
pub fn generate(kind: CorpusKind, m: usize, seed: u64) -> Result<PointSet> {
    PointSet::from_coords(kind.dim(), coordinates(kind, m, seed), Norm::L2)
}
