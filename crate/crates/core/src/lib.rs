//! Schur–Hadamard products of patterned random matrices.
//!
//! The crate builds `M_n = X_n ⊙ Y_n` from link functions, estimates the
//! *-moments `n^{-1-k/2} E tr(M^{ε₁}⋯M^{ε_k})`, counts the index classes that
//! drive their limits exactly, and summarizes spectra of `n^{-1/2} M_n`
//! against the circular law.

pub mod cli;
pub mod counting;
pub mod ensemble;
pub mod error;
pub mod linkfn;
pub mod moments;
pub mod partitions;
pub mod spectrum;
pub mod word;

pub use error::{Error, Result};
pub use faer;
pub use linkfn::LinkFunction;
pub use word::{Symbol, Word};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
