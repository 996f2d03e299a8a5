//! Exact, randomized, pseudorandomized and data-randomized confidence
//! intervals for a binomial probability, with an exact engine for their
//! coverage, expected length, domination and refinement properties.
//!
//! Every construction targets the equi-tailed constraints
//! `P(theta > upper) <= alpha/2` and `P(theta < lower) <= alpha/2`.

pub mod analysis;
pub mod auxiliary;
pub mod error;
pub mod intervals;
pub mod numerics;
pub mod quadrature;

pub use error::{Error, Result};
