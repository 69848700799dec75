//! File formats, report assembly and subcommand logic for the `qkz`
//! command-line tool.

pub mod commands;
pub mod config;
pub mod report;
pub mod suite;
