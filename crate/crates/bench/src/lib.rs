//! Criterion benchmarks for index construction and queries live in
//! `benches/queries.rs`; run them with `cargo bench -p netclust-bench`.
