//! Criterion benchmarks for the `cardguess` library live in `benches/`.
