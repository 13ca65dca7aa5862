//! Benchmarks of the hot paths: period evaluation, metric points and exact
//! Lefschetz decomposition. See `benches/`.
