//! Rank-one Boolean tensor factorization through linear programming.
//!
//! Given a binary `n × m × l` tensor `G`, the goal is the closest rank-one
//! binary tensor `x ⊗ y ⊗ z` in Hamming distance. This crate provides
//!
//! * dense bit-packed tensors and factor triples ([`tensor`]),
//! * the fully-random and semi-random corruption models ([`corruption`]),
//! * an exhaustive exact solver used as ground-truth oracle ([`exact`]),
//! * the standard, flower and complete LP relaxations with exact
//!   separation oracles ([`lp`]),
//! * a bounded-variable revised simplex with a cutting-plane loop and an
//!   LP-based uniqueness probe ([`solver`]),
//! * closed-form recovery thresholds, deterministic recovery conditions and
//!   an explicit dual certificate for the standard LP ([`theory`]),
//! * enumeration-based facet verification for the multilinear polytopes
//!   behind the relaxations ([`polytope`]),
//! * the pure part of the Monte-Carlo phase-diagram driver ([`experiment`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! thread-parallel drivers live in the companion `btf` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod bits;
pub mod corruption;
pub mod exact;
pub mod experiment;
pub mod lp;
pub mod polytope;
pub mod rng;
pub mod solver;
pub mod tensor;
pub mod theory;

pub use error::{Error, Result};
pub use tensor::{BinaryTensor, Dims, FactorTriple};
