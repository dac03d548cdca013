//! Core engine for a bug-assignment workbench.
//!
//! Everything in this crate is pure computation over in-memory data: the
//! bug-report corpus model, summary tokenization and the bug-term matrix,
//! chi-square term selection and gain-ratio field ranking, a Naive Bayes
//! developer ranker, and stratified cross-validated evaluation. File formats,
//! the tracker REST client, and the command-line front end live in the
//! companion `bugassign-cli` crate.
//!
//! The crate is `no_std` (with `alloc`) so the engine can be embedded
//! anywhere; float math goes through `libm`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod nbayes;
pub mod pipeline;
pub mod rng;
pub mod synth;
pub mod textproc;

mod math;

pub use error::{Error, Result};
