//! Algebraic addition theorems, made executable.
//!
//! The crate verifies and discovers polynomial addition theorems
//! `G(φ(u), φ(v), φ(u+v)) = 0`, expands algebroid functions into Puiseux
//! branches, runs elimination chains, reduces addition theorems by series
//! GCDs and detects periods from root sets.

pub mod aat;
pub mod algebroid;
pub mod elimination;
pub mod error;
pub mod exec;
pub mod function;
pub mod hp;
pub mod linalg;
pub mod period;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod series;
pub mod spec;

pub use error::{Error, Result};
pub use exec::ExecMode;
pub use hp::Fixed;
pub use poly::MultiPoly;
pub use scalar::{Analytic, Coeff, Scalar};
