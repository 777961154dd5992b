//! Exact constructions of the simple Jordan pairs, triple systems and
//! algebras of types I and IV, their explicit automorphism families, and a
//! brute-force oracle that evaluates automorphism groups over finite rings.

pub mod autfam;
pub mod catalog;
pub mod claims;
pub mod cli;
pub mod error;
pub mod gradelie;
pub mod jordan;
pub mod matrix;
pub mod oracle;
pub mod ring;

pub use error::{Error, Result};
pub use matrix::{BilinearForm, Matrix};
pub use ring::{Ring, RingDescriptor, RingElement};
