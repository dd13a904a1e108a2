//! Exact sum-product laboratory.
//!
//! Computes sumsets, productsets, ratio sets and multiplicative energy of
//! finite sets of positive rationals in exact arithmetic, and builds
//! machine-checkable certificates for the dyadic ray decomposition bounding
//! `E(A)` by `|A+A|²` and for the k-fold simplex-sum construction bounding
//! `|kA|` from below.

pub mod cert2d;
pub mod certkd;
pub mod cli;
pub mod energy;
pub mod error;
pub mod explore;
pub mod geomkd;
pub(crate) mod kernel;
pub mod ledger;
pub mod numset;
pub mod rat;

pub use error::{Error, Result};
pub use numset::NumberSet;
pub use rat::Rat;
