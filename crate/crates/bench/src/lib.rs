//! Criterion benchmarks for `aspl-core`; see `benches/`.
