//! Exact-computation library for additive energies, bilinear character sums
//! and smooth/square-free residue-class counts over F_q\[X\]/F(X).
//!
//! The crate is organized around an immutable [`field::ResidueField`]
//! context (tables for the field F_q\[X\]/F(X) = F_{q^r}) built on top of
//! exact polynomial arithmetic over F_q ([`gf`]). The evaluator modules
//! ([`energy`], [`bilinear`], [`classes`]) are pure functions over that
//! context; every counted quantity has an exact big-integer path, and every
//! float path is checked against it in the test suites.

pub mod bilinear;
pub mod classes;
pub mod energy;
pub mod error;
pub mod field;
pub mod gf;

pub use error::{Error, Result};
