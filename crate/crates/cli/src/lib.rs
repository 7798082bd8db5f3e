//! Command-line driver: config parsing, command dispatch and reports.

pub mod commands;
pub mod config;
pub mod report;
