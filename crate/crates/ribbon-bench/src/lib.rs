//! Benchmark-only crate: see `benches/core.rs` for the measurements of
//! boundary tracing, partial duals, normal forms, direction enumeration,
//! and the main theorem sweep on representative presentations.
