//! Criterion benchmarks for kaleido-core live under `benches/`.
