//! Drives the spanbound library from the command line: single-instance
//! checks, seeded fuzzing with counterexample shrinking, and report
//! generation over JSONL run logs.
//!
//! Exit codes are part of the contract: 0 for a clean run, 1 when an
//! asserted check fails (a minimized counterexample is logged), 2 for
//! usage or backend errors, 3 when a search budget is exceeded.

pub mod fuzz;
pub mod instance;
pub mod report;
pub mod runner;
