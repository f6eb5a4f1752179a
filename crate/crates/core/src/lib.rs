//! Drinfeld `F_q[t]`-modules with level `(t)` structure, the graded ring of
//! the Satake compactification, dimensions of spaces of Drinfeld modular
//! forms, invariant subrings for level subgroups, and spherical Hecke
//! double-coset combinatorics.
//!
//! Every dimension or structure constant the library computes has an
//! independent brute-force counterpart over a finite field; see the
//! `verify` module for the checks that tie them together.

pub mod caps;
pub mod error;
pub mod field;
pub mod group;
pub mod hecke;
pub mod linalg;
pub mod drinfeld;
pub mod mpoly;
pub mod ratfn;
pub mod satake;
pub mod skew;
pub mod verify;

pub use caps::Caps;
pub use error::{Error, Result};
pub use field::{FieldDesc, FieldElement};
pub use group::SubgroupGens;
pub use hecke::{DivisorType, HeckeElement};
pub use linalg::MatrixFq;
pub use mpoly::{MPoly, PolyRing};
