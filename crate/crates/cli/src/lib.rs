//! Pipeline plumbing behind the `beliefmine` command.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod fixtures;

pub use commands::{run, Command, RunOptions};
pub use config::RunConfig;
