//! Finite Dickson near-fields, cyclotomic association schemes over them,
//! and the group machinery to compute and cross-check their automorphism
//! and isomorphism structure.

pub mod arith;
pub mod census;
pub mod error;
pub mod finite_field;
pub mod matrix;
pub mod nearfield;
pub mod perm;
pub mod scheme;
pub mod zsigmondy;

pub use error::{Error, Result};
pub use finite_field::{Elt, FiniteField};
