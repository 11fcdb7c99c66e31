//! Exact and arbitrary-precision evaluation of alternating Euler sums over
//! half-integer denominators.
//!
//! The crate evaluates three families of nested sums (`T`, `S`, `R`, see
//! [`seriesnum::SumSpec`]) two independent ways: closed-form reduction to a
//! rational linear combination of classical constants ([`identities`]), and
//! direct arbitrary-precision series summation ([`seriesnum`] on top of
//! [`numkernel`]). The [`verifier`] module cross-checks the two routes
//! against each other and against golden reference tables.

pub mod cli;
pub mod error;
pub mod identities;
pub mod numkernel;
pub mod seqcore;
pub mod seriesnum;
pub mod symval;
pub mod verifier;

pub use error::{Error, Result};
