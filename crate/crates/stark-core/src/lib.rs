//! Exact arithmetic in real quadratic fields, ray class groups, Shintani
//! cone decompositions and truncated two-variable power series, assembled
//! into p-adic values at `s = 1` of twisted partial zeta functions and the
//! group-ring element they define.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is exact: real
//! embeddings are handled by integer sign analysis, p-adic numbers by
//! residues modulo a fixed power of `p`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod charpairs;
pub mod cyclo;
pub mod error;
pub mod lattice;
pub mod modp;
pub mod phi;
pub mod quadfield;
pub mod rayclass;
pub mod series;
pub mod shintani;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
