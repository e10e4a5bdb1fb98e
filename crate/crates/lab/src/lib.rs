//! Config-driven experiment runner for the `cwikel-core` checks, with CSV,
//! JSON and plot-data reports.
//!
//! A run resolves a selection of suite ids, executes the suites in a work
//! pool and returns report rows sorted by experiment id and parameter hash,
//! so a fixed seed gives byte-identical output.

pub mod cli;
pub mod config;
pub mod report;
pub mod rng;
pub mod runner;
pub mod suites;

pub use config::{RunConfig, Selection};
pub use report::{emit, Claim, ExperimentReport, Format, Verdict};
pub use runner::{run, RunError};
pub use suites::{SuiteInfo, SUITES};
