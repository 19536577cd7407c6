//! Finite, computable ingredients of the interval-of-Turán-densities
//! construction: LPS Ramanujan Cayley graphs, hypergraph Lagrangians,
//! the spectral gadget and outer constructions, the recursive ψ/μ/ν
//! machinery with greedy target hitting, and the join/lift/palette
//! transfer constructions.

// `!(x <= y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod error;
pub mod group;
pub mod hypergraph;
pub mod numtheory;
pub mod psl2;
pub mod recursion;
pub mod spectral;

pub use error::{Error, Result};

/// Exact rational used for combinatorial counts and closed-form constants.
pub type Rational = num_rational::Ratio<i128>;

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;
