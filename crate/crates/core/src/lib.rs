//! Exact computation of twisted Zhu algebras `A_{g,n}(V)`, the bimodules
//! `A_{g,n,m}(V)`, and Verma-type admissible twisted modules built from them.
//!
//! Everything is computed over the rationals with no rounding. The built-in
//! vertex operator algebra is the rank-one free boson `M(1)` with either the
//! trivial automorphism or the involution `h -> -h`.

pub mod error;
pub mod generators;
pub mod grade;
pub mod identities;
pub mod linalg;
pub mod products;
pub mod quotient;
pub mod scalar;
pub mod verma;
pub mod voa;

pub use error::{Error, Result};
pub use grade::GradeIndex;
pub use scalar::Scalar;
