//! Criterion benchmarks for `fermifold`; see `benches/`.
