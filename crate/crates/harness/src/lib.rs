//! Experiment harness: configurations, seeded function families, the seven suites and
//! their reports.

pub mod catalog;
pub mod config;
pub mod error;
pub mod families;
pub mod report;
pub mod suites;

pub use catalog::{list_experiments, SuiteId, SuiteInfo};
pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use report::NormReport;
pub use suites::run_experiment;
