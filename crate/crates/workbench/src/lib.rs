//! Tooling around the query engine: a mini-IR with five data-flow
//! analysis encoders, seeded random instance generation, and a benchmark
//! harness. The `ifds` binary exposes all of it.

pub mod analyses;
pub mod bench;
pub mod mini;
pub mod randgen;
