//! Criterion benchmarks for the phwarm workspace live in `benches/`.
