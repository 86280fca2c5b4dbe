//! Benchmark-only crate; see `benches/solver_primitives.rs`.
