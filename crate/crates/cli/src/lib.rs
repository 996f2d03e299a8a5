//! Front end for the `randci` engine: intervals, exact coverage sweeps,
//! long-run simulations and method comparisons, written as CSV, JSON or SVG.
//!
//! Every output is a pure function of the flags (and seed), so repeated runs
//! produce identical bytes.

pub mod args;
pub mod commands;
pub mod render;
pub mod svg;

pub use args::Cli;
pub use commands::{deliver, execute, output_args, Output};
