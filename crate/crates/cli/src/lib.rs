//! Configuration, identity suites, convergence studies and reports for the
//! `qhalab` command-line driver.

pub mod config;
pub mod error;
pub mod fixtures;
pub mod report;
pub mod studies;
pub mod suites;
pub mod table;

pub use config::RunConfig;
pub use error::CliError;
pub use report::{CheckRecord, Relation, Report};
pub use studies::{run_convergence, Study};
pub use suites::{run_suite, Suite, SuiteRun};
pub use table::Table;

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "QHALAB_OUT_DIR";
