//! Criterion benchmarks for `gpcq-core`; see `benches/`.
