//! Gapped k-mer incidence matrices over position-dependent alphabets.
//!
//! For a profile `B = (b_1, ..., b_l)` of per-position alphabet sizes, the
//! incidence matrix `A` has one row per gapped word with exactly `k` letters
//! and one column per ungapped word, with a one wherever the two words match.
//! This crate builds `A`, writes down the nonzero spectrum of `A A^T` in closed
//! form, and evaluates the Moore-Penrose pseudoinverse `W` and the projector
//! `H = W A` entrywise or matrix-free. Every closed form is backed by an
//! independent exact-arithmetic check in [`oracle`].
//!
//! All numerics are exact (`BigInt` / `BigRational`); floating point appears
//! only in [`spectra::q_matrix_float`] and the optional float exports.

pub mod error;
pub mod estimate;
pub mod io;
pub mod nu;
pub mod oracle;
pub mod par;
pub mod pinv;
pub mod spectra;
pub mod symfunc;
pub mod words;

pub use error::{Error, Result};
pub use par::Execution;
pub use words::{AlphabetProfile, PositionSets, Symbol, Word, WordSpace};

/// Arbitrary-precision rational used for every closed-form entry.
pub type ExactScalar = num_rational::BigRational;
