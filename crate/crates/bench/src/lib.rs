//! Criterion benchmarks for the `jcl-core` kernels live under `benches/`.
