//! Experiment harness behind the `qbc` binary: configuration, the Monte Carlo
//! experiments, and the subcommand bodies.

pub mod commands;
pub mod config;
pub mod experiments;
