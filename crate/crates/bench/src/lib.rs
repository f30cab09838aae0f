//! Criterion benchmarks for the numerical kernels of `hardy-core`; see
//! `benches/kernels.rs`.
