//! Local ramification data and Serre invariants for exceptional mod-ℓ
//! Galois representations with projective image A4, S4 or A5.

pub mod arith;
mod bigjson;
pub mod catalog;
pub mod character;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod galois;
pub mod local;
pub mod perm;
pub mod poly;
pub mod recipe;

pub use error::{Error, Result};
pub use galois::GlobalGroup;
pub use poly::{PrimeFieldPoly, ZPoly};
