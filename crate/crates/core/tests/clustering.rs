mod common;

use common::{ball_query, clustered_query, ids, index, rng, small_line, uniform_query, within};
use netclust::clustering::{
    build_coreset, evaluate_center, evaluate_median, gonzalez, one_center, one_median_fast,
    one_median_fast_traced, one_median_simple, p_center, p_median, MAX_SUBSET_COMBINATIONS,
};
use netclust::corpus::{self, CorpusKind};
use netclust::oracle::{exact_one_center, exact_one_median, exact_p_center, exact_p_median};
use netclust::{AlgoParams, Error, NetIndex, PointId};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn small_line_medians() {
    let idx = small_line();
    let all = ids(&[0, 1, 2, 3]);
    for eps in [0.5, 0.25, 0.1] {
        let params = AlgoParams::new(eps).unwrap();
        for r in [
            one_median_simple(&idx, &all, eps).unwrap(),
            one_median_fast(&idx, &all, &params).unwrap(),
        ] {
            assert!(r.objective <= (1.0 + eps) * 5.0);
            assert_eq!(
                r.objective,
                evaluate_median(idx.points(), &all, &r.centers).unwrap()
            );
        }
        let r = one_median_fast(&idx, &ids(&[0, 3]), &params).unwrap();
        assert_eq!(r.objective, 4.0);
        assert!(r.centers[0].0 <= 3);
    }
}

#[test]
fn small_line_centers() {
    let idx = small_line();
    for eps in [0.5, 0.25, 0.1] {
        assert!(one_center(&idx, &ids(&[0, 3]), eps).unwrap().objective <= (1.0 + eps) * 2.0);
        assert!(
            one_center(&idx, &ids(&[0, 1, 2, 3]), eps)
                .unwrap()
                .objective
                <= (1.0 + eps) * 2.0
        );
        let r = p_center(&idx, &ids(&[0, 1, 2, 3]), 2, eps).unwrap();
        assert!(r.objective <= (1.0 + eps) * 1.0);
        assert_eq!(r.centers.len(), 2);
    }
}

#[test]
fn small_line_p_median() {
    let idx = small_line();
    let r = p_median(&idx, &ids(&[0, 1, 2, 3]), 2, &AlgoParams::new(0.5).unwrap()).unwrap();
    assert!(r.objective <= 3.0);
    assert_eq!(
        exact_p_median(idx.points(), &ids(&[0, 1, 2, 3]), 2)
            .unwrap()
            .1,
        2.0
    );
}

#[test]
fn singleton_queries_cost_nothing() {
    let idx = index(CorpusKind::GaussianMixture, 200, 1);
    let q = ids(&[17]);
    let params = AlgoParams::new(0.25).unwrap();
    assert_eq!(one_median_simple(&idx, &q, 0.25).unwrap().objective, 0.0);
    assert_eq!(one_median_fast(&idx, &q, &params).unwrap().centers, q);
    assert_eq!(one_center(&idx, &q, 0.25).unwrap().centers, q);
    assert_eq!(p_median(&idx, &q, 3, &params).unwrap().objective, 0.0);
}

#[test]
fn bad_parameters_are_rejected() {
    let idx = small_line();
    let q = ids(&[0, 1]);
    assert!(matches!(
        one_median_simple(&idx, &q, 0.0),
        Err(Error::InvalidEps(_))
    ));
    assert!(matches!(
        one_median_simple(&idx, &q, 0.75),
        Err(Error::InvalidEps(_))
    ));
    assert!(AlgoParams::new(0.9).is_err());
    assert!(p_center(&idx, &q, 0, 0.5).is_err());
    assert!(p_median(&idx, &q, 0, &AlgoParams::new(0.5).unwrap()).is_err());
    assert!(one_center(&idx, &[], 0.5).is_err());
    assert!(one_center(&idx, &ids(&[9]), 0.5).is_err());
    assert!(evaluate_center(idx.points(), &q, &[]).is_err());
}

#[test]
fn strict_constants_need_long_lists() {
    let q: Vec<PointId> = (0..300).step_by(7).map(PointId).collect();
    let short = index(CorpusKind::Line, 300, 3);
    assert!(one_median_fast(&short, &q, &AlgoParams::strict(0.25).unwrap()).is_err());
    let long = NetIndex::build(corpus::generate(CorpusKind::Line, 300, 3).unwrap(), 60).unwrap();
    let r = one_median_fast(&long, &q, &AlgoParams::strict(0.25).unwrap()).unwrap();
    let (_, opt) = exact_one_median(long.points(), &q);
    assert!(within(r.objective, 1.25 * opt));
}

#[test]
fn fast_trace_invariants() {
    let mut r = rng(21);
    for kind in CorpusKind::ALL {
        let idx = index(kind, 400, 21);
        for k in 0..12 {
            let q = match k % 3 {
                0 => uniform_query(400, 64, &mut r),
                1 => ball_query(&idx, 64, &mut r),
                _ => clustered_query(&idx, 64, 3, &mut r),
            };
            let params = AlgoParams::new(0.25).unwrap();
            let (res, t) = one_median_fast_traced(&idx, &q, &params).unwrap();
            assert_eq!(t.n, q.len());
            let mut skipped = 0u64;
            let mut far_before: Vec<PointId> = Vec::new();
            for it in &t.iterations {
                skipped += it.skipped_weight;
                let kept: u64 = it.reps.iter().map(|&(_, w)| w as u64).sum();
                assert_eq!(kept + skipped, t.n as u64, "{kind} level {}", it.level);
                assert_eq!(it.far.len() as u64, skipped);
                assert!(far_before.iter().all(|x| it.far.binary_search(x).is_ok()));
                far_before = it.far.clone();
            }
            if let (Some((level, _)), Some(near)) = (t.halt, t.near_sum_at_halt) {
                let bound = (params.alpha + 2.0) * t.n as f64 * 2.0f64.powi(level);
                assert!(near <= bound, "{kind}: {near} > {bound}");
            }
            assert_eq!(res, one_median_fast(&idx, &q, &params).unwrap());
        }
    }
}

#[test]
fn queries_are_deterministic_and_order_free() {
    let idx = index(CorpusKind::GaussianMixture, 500, 5);
    let mut q = uniform_query(500, 80, &mut rng(5));
    let params = AlgoParams::new(0.25).unwrap();
    let a = (
        one_median_fast(&idx, &q, &params).unwrap(),
        p_center(&idx, &q, 2, 0.25).unwrap(),
        p_median(&idx, &q, 2, &params).unwrap(),
    );
    q.reverse();
    q.extend_from_slice(&q.clone()[..10]);
    let b = (
        one_median_fast(&idx, &q, &params).unwrap(),
        p_center(&idx, &q, 2, 0.25).unwrap(),
        p_median(&idx, &q, 2, &params).unwrap(),
    );
    assert_eq!(a, b);
}

#[test]
fn p_median_with_one_center_is_close_to_one_median() {
    let idx = index(CorpusKind::Line, 300, 8);
    let q = uniform_query(300, 50, &mut rng(8));
    let r = p_median(&idx, &q, 1, &AlgoParams::new(0.25).unwrap()).unwrap();
    let (_, opt) = exact_one_median(idx.points(), &q);
    assert!(within(r.objective, 1.25 * opt));
}

#[test]
fn coreset_keeps_all_weight() {
    let idx = index(CorpusKind::Grid2d, 400, 0);
    let q = uniform_query(400, 200, &mut rng(2));
    for p in [1, 2, 3] {
        let c = build_coreset(&idx, &q, p, 0.25).unwrap();
        assert_eq!(c.total_weight(), 200);
        assert!(c.points.len() <= 200);
    }
}

#[test]
fn subset_blow_up_is_guarded() {
    let idx = index(CorpusKind::Grid2d, 3000, 0);
    let q: Vec<PointId> = (0..3000).map(PointId).collect();
    let err = p_center(&idx, &q, 6, 0.1).unwrap_err();
    match err {
        Error::TooManyCombinations {
            combinations,
            limit,
        } => {
            assert_eq!(limit, MAX_SUBSET_COMBINATIONS);
            assert!(combinations > limit);
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn gonzalez_radius_is_within_twice_optimal() {
    let mut r = rng(4);
    for kind in CorpusKind::ALL {
        let idx = index(kind, 40, 4);
        for p in 1..=3 {
            let q = uniform_query(40, r.gen_range(p..=40), &mut r);
            let (b, radius) = gonzalez(idx.points(), &q, p).unwrap();
            assert_eq!(radius, evaluate_center(idx.points(), &q, &b).unwrap());
            let (_, opt) = exact_p_center(idx.points(), &q, p).unwrap();
            assert!(within(radius, 2.0 * opt));
        }
    }
}

fn arb_instance() -> impl Strategy<Value = (CorpusKind, usize, u64, Vec<usize>)> {
    (
        prop::sample::select(CorpusKind::ALL.to_vec()),
        10usize..200,
        0u64..500,
        prop::collection::vec(0usize..1000, 1..48),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn one_median_within_bound((kind, m, seed, picks) in arb_instance(), eps in prop::sample::select(vec![0.5, 0.25, 0.1])) {
        let idx = index(kind, m, seed);
        let q: Vec<PointId> = picks.iter().map(|&p| PointId((p % m) as u32)).collect();
        let (_, opt) = exact_one_median(idx.points(), &q);
        prop_assert!(within(one_median_simple(&idx, &q, eps).unwrap().objective, (1.0 + eps) * opt));
        prop_assert!(within(one_median_fast(&idx, &q, &AlgoParams::new(eps).unwrap()).unwrap().objective, (1.0 + eps) * opt));
    }

    #[test]
    fn one_center_within_bound((kind, m, seed, picks) in arb_instance(), eps in prop::sample::select(vec![0.5, 0.25, 0.1])) {
        let idx = index(kind, m, seed);
        let q: Vec<PointId> = picks.iter().map(|&p| PointId((p % m) as u32)).collect();
        let (_, opt) = exact_one_center(idx.points(), &q);
        prop_assert!(within(one_center(&idx, &q, eps).unwrap().objective, (1.0 + eps) * opt));
    }

    #[test]
    fn small_p_within_bound(kind in prop::sample::select(CorpusKind::ALL.to_vec()), m in 8usize..40, seed in 0u64..500, p in 2usize..=3, n in 3usize..40) {
        let idx = index(kind, m, seed);
        let q = uniform_query(m, n, &mut rng(seed));
        let (_, opt) = exact_p_center(idx.points(), &q, p).unwrap();
        prop_assert!(within(p_center(&idx, &q, p, 0.5).unwrap().objective, 1.5 * opt));
        let (_, opt) = exact_p_median(idx.points(), &q, p).unwrap();
        prop_assert!(within(p_median(&idx, &q, p, &AlgoParams::new(0.5).unwrap()).unwrap().objective, 2.0 * opt));
    }
}
