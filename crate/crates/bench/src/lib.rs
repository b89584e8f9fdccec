//! Benchmark-only crate; the measurements live in `benches/pipeline.rs`.
//!
//! Kept as a separate workspace member so the core library does not carry
//! criterion in its dev-dependency tree.
