//! Criterion benchmarks for fracprop; see `benches/`.
