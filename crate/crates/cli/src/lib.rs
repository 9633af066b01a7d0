//! Library surface of the `qmeas` command-line tool.
//!
//! The binary in `main.rs` is a thin shell: argument parsing, file handling,
//! and exit codes. Everything it does — config validation, the run/sweep/fuzz
//! pipelines, and report serialization — lives here so integration tests can
//! drive the same code paths in-process.

pub mod config;
pub mod pipeline;
pub mod report;
