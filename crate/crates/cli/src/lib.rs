//! Command-line front end for `icard`: an ordinal calculator, the GL prover,
//! bouquet and d-map tools, and the `satisfy` pipeline.
//!
//! [`run`] executes a parsed [`Cli`] and returns the rendered output with its
//! exit code, so tests can drive commands without spawning a process.

pub mod args;
pub mod commands;
pub mod satisfy;

pub use args::Cli;
pub use commands::{exit_code, run, Output};
pub use satisfy::{cmd_satisfy, Input, Options, Outcome, WitnessReport};
