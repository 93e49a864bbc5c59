//! Exact combinatorics of toric charts for degenerating abelian varieties.
//!
//! The crate turns combinatorial degeneration data (lattices `X`, `Y`, the
//! map `phi`, the pairing `b` and a finite group `Gamma`) into a periodic
//! rational polyhedral decomposition of `C = X^dual_R x R_{>0} u {0}`,
//! presents the affine toric charts `Z(sigma)` attached to each cone and
//! verifies log smoothness, admissibility, polarization and tameness
//! conditions with exact integer arithmetic.

pub mod degeneration;
pub mod error;
pub mod lattice;
pub mod monoids;
pub mod polyhedra;
pub mod serial;

pub use error::{Error, Result};
