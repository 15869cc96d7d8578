//! Criterion benchmarks for the loss and gradient kernels; see `benches/`.
