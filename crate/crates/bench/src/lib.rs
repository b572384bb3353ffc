//! Criterion benchmarks for the spectral kernels and samplers; see `benches/`.
