//! Exact polynomial arithmetic over Z and F_p, and p-adic splitting.

mod fp;
pub mod linalg;
mod padic;
mod zpoly;

pub use fp::{brute_force_roots, factor_mod_p, PrimeFieldPoly};
pub use padic::{field_disc_valuation, padic_splitting, splitting_type, unramified_degrees, PAdicFactor, PAdicFactorization};
pub use zpoly::{discriminant, resultant, sturm_real_roots, ZPoly};
pub(crate) use zpoly::mod_inverse;
