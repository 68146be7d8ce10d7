//! Criterion benchmarks for the staircase crates; see `benches/`.
