//! Library surface behind the `ffenergy` binary: field resolution, weight
//! sources, the quantity registry, the sweep driver, report emission and the
//! self-test suite. Everything here is deterministic given the sweep spec
//! and seed, independent of worker count.

pub mod context;
pub mod quantity;
pub mod report;
pub mod selftest;
pub mod sweep;
pub mod weights;
