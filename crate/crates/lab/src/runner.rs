//! Suite selection and order-stable execution.

use rayon::prelude::*;

use crate::config::{RunConfig, Selection};
use crate::report::{sort_reports, ExperimentReport};
use crate::suites::{self, SuiteInfo, SUITES};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RunError {
    #[error("unknown experiment `{id}`; valid ids: {}", valid.join(", "))]
    UnknownSuite { id: String, valid: Vec<&'static str> },
}

/// Resolves a selection to registered suites, in registry order without repeats.
pub fn resolve(selection: &Selection) -> Result<Vec<&'static SuiteInfo>, RunError> {
    match selection {
        Selection::All => Ok(SUITES.iter().collect()),
        Selection::Only(ids) => {
            for id in ids {
                if suites::suite(id).is_none() {
                    return Err(RunError::UnknownSuite { id: id.clone(), valid: suites::suite_ids() });
                }
            }
            Ok(SUITES.iter().filter(|s| ids.iter().any(|id| id == s.id)).collect())
        }
    }
}

/// Runs the selected suites in the thread pool; rows come back sorted by
/// experiment id, then by the hash of their parameters.
pub fn run(config: &RunConfig) -> Result<Vec<ExperimentReport>, RunError> {
    let selected = resolve(&config.selection)?;
    let mut reports: Vec<ExperimentReport> =
        selected.par_iter().map(|info| suites::run_suite(info, config)).collect::<Vec<_>>().into_iter().flatten().collect();
    sort_reports(&mut reports);
    Ok(reports)
}
