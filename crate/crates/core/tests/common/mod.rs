#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use netclust::corpus::{self, CorpusKind};
use netclust::oracle::{naive_build, NaiveProjNode, NaiveTree};
use netclust::{NetIndex, PointId, ProjectedTree};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ids(v: &[u32]) -> Vec<PointId> {
    v.iter().map(|&i| PointId(i)).collect()
}

pub fn index(kind: CorpusKind, m: usize, seed: u64) -> NetIndex {
    NetIndex::build(corpus::generate(kind, m, seed).unwrap(), 8).unwrap()
}

/// The 4-point line {0, 1, 2, 4}.
pub fn small_line() -> NetIndex {
    let ps =
        netclust::PointSet::from_coords(1, vec![0.0, 1.0, 2.0, 4.0], netclust::Norm::L2).unwrap();
    NetIndex::build(ps, 8).unwrap()
}

/// `n` distinct points drawn uniformly from `0..m`, sorted.
pub fn uniform_query(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<PointId> {
    let mut all: Vec<u32> = (0..m as u32).collect();
    all.shuffle(rng);
    let mut q: Vec<PointId> = all[..n.min(m)].iter().map(|&i| PointId(i)).collect();
    q.sort_unstable();
    q
}

/// The `n` points closest to a random center, sorted.
pub fn ball_query(index: &NetIndex, n: usize, rng: &mut ChaCha8Rng) -> Vec<PointId> {
    let m = index.len();
    let center = PointId(rng.gen_range(0..m as u32));
    let mut all: Vec<PointId> = (0..m as u32).map(PointId).collect();
    all.sort_by(|&a, &b| {
        index
            .distance(center, a)
            .total_cmp(&index.distance(center, b))
            .then(a.cmp(&b))
    });
    let mut q = all[..n.min(m)].to_vec();
    q.sort_unstable();
    q
}

/// A few well-separated tight clusters.
pub fn clustered_query(index: &NetIndex, n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<PointId> {
    let mut q = Vec::new();
    for _ in 0..k {
        q.extend(ball_query(index, n.div_ceil(k), rng));
    }
    q.sort_unstable();
    q.dedup();
    q
}

pub fn within(value: f64, bound: f64) -> bool {
    value <= bound * (1.0 + 1e-9) + 1e-9
}

pub fn pow2(i: i32) -> f64 {
    2.0f64.powi(i)
}

/// First difference between the fast build and the definition-chasing
/// oracle, if any: nets, uncompacted tree arcs and every list.
pub fn oracle_diff(idx: &NetIndex, naive: &NaiveTree) -> Option<String> {
    if naive.i_top != idx.i_top() {
        return Some(format!("i_top {} vs {}", idx.i_top(), naive.i_top));
    }
    for i in 0..=idx.i_top() {
        if naive.nets[i as usize] != idx.nets().level(i) {
            return Some(format!("net {i}"));
        }
    }
    let fast: BTreeMap<_, _> = idx.tree().uncompacted_edges().into_iter().collect();
    if fast != naive.parent {
        return Some("tree arcs".into());
    }
    for (&(y, i), list) in &naive.lists {
        let mut got: Vec<PointId> = idx.c_list(y, i, naive.c).unwrap().collect();
        got.sort_unstable();
        if &got != list {
            return Some(format!("list of {y} at level {i}"));
        }
    }
    None
}

pub fn assert_matches_oracle(idx: &NetIndex) {
    let naive = naive_build(idx.points(), 8);
    if let Some(diff) = oracle_diff(idx, &naive) {
        panic!("fast build differs from oracle: {diff}");
    }
}

/// Packing and strict covering violations over all levels.
pub fn net_violations(idx: &NetIndex) -> usize {
    let mut bad = 0;
    for i in 1..=idx.i_top() {
        let net = idx.nets().level(i);
        for (a, &x) in net.iter().enumerate() {
            bad += net[a + 1..]
                .iter()
                .filter(|&&y| idx.distance(x, y) < pow2(i))
                .count();
        }
        for &z in idx.nets().level(i - 1) {
            if !net.iter().any(|&y| idx.distance(y, z) < pow2(i)) {
                bad += 1;
            }
        }
    }
    bad
}

/// Level-by-level recursive scan from every `y ∈ Y_i`, counting points `x`
/// reached at level `j` with `d(x, y) > c 2^(i+1) - c 2^(j+1)`.
pub fn scan_distance_violations(idx: &NetIndex) -> usize {
    let c = 8.0;
    let mut bad = 0;
    for i in 1..=idx.i_top() {
        for &y in idx.nets().level(i) {
            let mut frontier: BTreeSet<PointId> = [y].into();
            for j in (0..i).rev() {
                let mut next = BTreeSet::new();
                for &u in &frontier {
                    next.extend(idx.c_list(u, j + 1, 8).unwrap());
                }
                for &x in &next {
                    if idx.distance(x, y) > c * pow2(i + 1) - c * pow2(j + 1) + 1e-9 {
                        bad += 1;
                    }
                }
                frontier = next;
            }
        }
    }
    bad
}

pub fn ancestor_distance_violations(idx: &NetIndex) -> usize {
    let parent: BTreeMap<_, _> = idx.tree().uncompacted_edges().into_iter().collect();
    let mut bad = 0;
    for &(x, j) in parent.keys() {
        let mut cur = (x, j);
        while let Some(&Some(up)) = parent.get(&cur) {
            if idx.distance(x, up.0) > pow2(up.1 + 1) - pow2(j + 1) + 1e-9 {
                bad += 1;
            }
            cur = up;
        }
    }
    bad
}

pub fn search_coverage_violations(idx: &NetIndex, eps: f64, reach: f64) -> usize {
    let m = idx.len() as u32;
    let mut bad = 0;
    for i in 0..=idx.i_top() {
        for &y in idx.nets().level(i) {
            let found = idx.descendants_search(y, i, eps).unwrap();
            for x in (0..m).map(PointId) {
                if idx.distance(x, y) > reach * pow2(i) {
                    continue;
                }
                let best = found
                    .iter()
                    .map(|&z| idx.distance(x, z))
                    .fold(f64::INFINITY, f64::min);
                if best > eps * pow2(i) + 1e-9 {
                    bad += 1;
                }
            }
        }
    }
    bad
}

/// The compacted projection as oracle-shaped nodes.
pub fn as_naive(proj: &ProjectedTree) -> Vec<NaiveProjNode> {
    let copy = |j: u32| {
        let n = proj.node(j);
        (n.point, n.level)
    };
    let mut out: Vec<NaiveProjNode> = (0..proj.len() as u32)
        .map(|j| NaiveProjNode {
            copy: copy(j),
            parent: proj.node(j).parent.map(copy),
            weight: proj.node(j).weight,
        })
        .collect();
    out.sort();
    out
}
