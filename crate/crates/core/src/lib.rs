//! Certified re-execution of the computations behind two extension theorems
//! for D(4)-tuples: sets of positive integers in which the product of any two
//! elements, increased by 4, is a perfect square.
//!
//! The crate is layered bottom-up:
//!
//! - [`arith`]: exact integers and certified (interval) reals.
//! - [`tuples`]: D(4)-tuple predicates and the regular extensions `d+`, `d-`.
//! - [`pell`]: the Pellian recurrences and the search for `v_m = w_n`.
//! - [`bounds`]: the hypergeometric and linear-forms-in-logarithms bounds.
//! - [`reduction`]: the Baker–Davenport reduction engine.
//! - [`verify`]: campaigns that sweep the remaining cases with checkpoints.
//! - [`cli`]: the `d4verify` command-line front end.

pub mod arith;
pub mod bounds;
pub mod cli;
mod error;
pub mod pell;
pub mod reduction;
mod serde_int;
pub mod tuples;
pub mod verify;

pub use arith::{CertifiedReal, ContinuedFraction, Integer, PrecisionPolicy, Sign};
pub use error::{Error, Result};
