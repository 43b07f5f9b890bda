//! Criterion benchmarks for `qhom-core`; see `benches/`.
