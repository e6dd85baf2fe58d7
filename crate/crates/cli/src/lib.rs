//! Scenario plumbing for the task-allocation simulator: TOML scenario
//! files, seeded instance generation, run reports, and trajectory CSVs.
//! The binary in this package wires these onto a command line.

pub mod builtin;
pub mod random;
pub mod report;
pub mod run;
pub mod scenario;
