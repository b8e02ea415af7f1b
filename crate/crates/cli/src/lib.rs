//! Batch front end for `martlab`: parameter handling, subcommands, the
//! check suites and report writers.

pub mod commands;
pub mod config;
pub mod report;
pub mod suite;
