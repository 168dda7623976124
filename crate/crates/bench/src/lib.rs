//! Criterion benchmarks for the decoder live in `benches/`.

pub use surftn;
