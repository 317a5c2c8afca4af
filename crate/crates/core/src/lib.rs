//! Wyner-Ziv coded key agreement for noisy identifiers.
//!
//! Two constructions generate a secret key from a binary identifier (e.g. a
//! PUF read-out) observed again through a binary symmetric channel at
//! reconstruction:
//!
//! * [`linear`] — random nested linear codes with brute-force vector
//!   quantization and table-based syndrome decoding, exhaustively auditable
//!   at small block lengths;
//! * [`polar`] + [`design`] — nested polar codes with list-decoder
//!   quantization, designed by a Monte-Carlo procedure for a target
//!   block-error probability, practical at n = 1024 and beyond.
//!
//! [`bounds`] provides the rate-region calculators and converse bounds the
//! designs are compared against, and [`keyagree`] wires enrollment and
//! reconstruction pipelines for both constructions plus the baseline schemes
//! (fuzzy commitment, code-offset, dithered variants, repetition+RM
//! concatenation).

pub mod bounds;
pub mod channel;
pub mod design;
pub mod error;
pub mod gf2;
pub mod keyagree;
pub mod linear;
pub mod polar;

pub use bounds::RateTuple;
pub use channel::{sample_bernoulli, sample_bsc, BscParam, SeedSpec};
pub use error::{Error, Result};
pub use gf2::{mat_vec, random_full_rank_parity, xor, BitVector, Gf2Matrix};
pub use polar::PolarCodePair;
