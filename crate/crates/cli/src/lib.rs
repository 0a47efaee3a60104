//! Command-line front end: flag/config resolution and subcommand execution.

pub mod config;
pub mod run;
