//! Construction and classification of binary self-dual codes that admit an
//! automorphism of odd prime order.
//!
//! The crate is layered bottom-up:
//!
//! * [`gf2core`]: bit-packed vectors, codes, duals and weight sweeps.
//! * [`perm`]: permutations and permutation groups.
//! * [`cyclotomic`]: arithmetic in `F2[x]/(x^p - 1)` and its ideal decomposition.
//! * [`decomp`]: splitting a code along an automorphism and reassembling it.
//! * [`equiv`]: canonical forms, equivalence and automorphism groups.
//! * [`catalog`]: bundled matrices and external dataset ingestion.
//! * [`classify`]: the enumeration pipelines and reports.

pub mod catalog;
pub mod classify;
pub mod cyclotomic;
pub mod decomp;
pub mod equiv;
pub mod gf2core;
pub mod perm;

pub use gf2core::{extremal_bound, BinaryCode, BitVector, WeightDistribution};
pub use perm::{PermGroup, Permutation};
