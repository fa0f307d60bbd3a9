//! Criterion benchmarks for the multicurve engine live under `benches/`.
