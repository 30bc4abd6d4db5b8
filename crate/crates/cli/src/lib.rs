//! Command-line front end for the fractional-order synchronization
//! toolkit: configuration resolution, CSV serialization, run reports, and
//! subcommand dispatch.
//!
//! Library-level so the binary stays a thin wrapper and tests can drive
//! complete invocations in-process via [`run`].

pub mod config;
pub mod report;
pub mod series;

mod run;
pub use run::{run, Cli, Command, CommonOpts, EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, EXIT_UNSTABLE};
