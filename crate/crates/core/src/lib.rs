//! Periodic points of polynomial self-maps over truncated totally ramified
//! p-adic rings.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line driver live in the `periodlab` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod dvr;
pub mod dynamics;
pub mod error;
pub mod period_lab;
pub mod power_map;
pub mod torsion_sieve;
pub mod residue_field;
pub mod ring;

pub use dvr::{DvrElement, Eisenstein, RingSpec};
pub use error::{Error, Result};
pub use residue_field::{FieldElem, FieldSpec};
pub use ring::Ring;
