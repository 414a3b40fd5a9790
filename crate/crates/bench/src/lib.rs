//! Benchmarks for the difflife toolkit live under `benches/`; run them with
//! `cargo bench -p difflife-bench`.
