//! Identity suites. Each check yields one record; errors and panics inside a
//! check become failing records and the suite continues.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::time::Instant;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{CheckRecord, Environment, Relation, Report, Timing};
use crate::table::Table;

mod basis;
mod bergman;
mod conv;
mod groups;
mod wiener;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Core,
    Conv,
    Groups,
    Wiener,
    Bergman,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["core", "conv", "groups", "wiener", "bergman", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Conv => "conv",
            Suite::Groups => "groups",
            Suite::Wiener => "wiener",
            Suite::Bergman => "bergman",
            Suite::All => "all",
        }
    }

    fn modules(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Core, Suite::Conv, Suite::Groups, Suite::Wiener, Suite::Bergman],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "core" => Suite::Core,
            "conv" => Suite::Conv,
            "groups" => Suite::Groups,
            "wiener" => Suite::Wiener,
            "bergman" => Suite::Bergman,
            "all" => Suite::All,
            _ => {
                return Err(CliError::UnknownName {
                    what: "suite",
                    name: s.to_string(),
                    expected: Suite::NAMES.join(", "),
                })
            }
        })
    }
}

/// Result of one check before it is compared with its tolerance.
pub(crate) struct Outcome {
    measured: f64,
    /// Data-dependent strict bound; replaces the configured tolerance.
    bound: Option<f64>,
    note: Option<String>,
}

impl Outcome {
    pub(crate) fn value(measured: f64) -> Self {
        Outcome {
            measured,
            bound: None,
            note: None,
        }
    }

    pub(crate) fn below(measured: f64, bound: f64) -> Self {
        Outcome {
            measured,
            bound: Some(bound),
            note: None,
        }
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

pub(crate) type CheckResult = Result<Outcome, CliError>;

pub(crate) struct Checker<'a> {
    pub(crate) cfg: &'a RunConfig,
    scale: f64,
    records: Vec<CheckRecord>,
    tables: Vec<Table>,
}

impl<'a> Checker<'a> {
    pub(crate) fn new(cfg: &'a RunConfig, scale: f64) -> Self {
        Checker {
            cfg,
            scale,
            records: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub(crate) fn check<F>(&mut self, id: &str, anchor: &str, criterion: Option<u8>, tol: f64, f: F)
    where
        F: FnOnce() -> CheckResult,
    {
        let tol = self.cfg.tolerance(id, tol, self.scale);
        let record = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(Ok(o)) => {
                let rec = match o.bound {
                    Some(b) => CheckRecord::new(id, anchor, criterion, o.measured, b, Relation::Below),
                    None => CheckRecord::new(id, anchor, criterion, o.measured, tol, Relation::AtMost),
                };
                match o.note {
                    Some(n) => rec.with_note(n),
                    None => rec,
                }
            }
            Ok(Err(e)) => CheckRecord::failed(id, anchor, criterion, tol, e.to_string()),
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                CheckRecord::failed(id, anchor, criterion, tol, format!("panic: {msg}"))
            }
        };
        if record.pass {
            log::info!("{}", record.summary());
        } else {
            log::warn!("{} [{}]", record.summary(), record.anchor);
        }
        self.records.push(record);
    }

    pub(crate) fn table(&mut self, table: Table) {
        self.tables.push(table);
    }
}

/// A suite's report and the error tables it produced.
#[derive(Clone, Debug)]
pub struct SuiteRun {
    pub report: Report,
    pub tables: Vec<Table>,
}

/// Runs a suite; `tol_scale` multiplies every configured tolerance.
pub fn run_suite(cfg: &RunConfig, suite: Suite, tol_scale: f64) -> Result<SuiteRun, CliError> {
    cfg.validate()?;
    if !(tol_scale.is_finite() && tol_scale > 0.0) {
        return Err(CliError::Config {
            field: "--tol-scale".into(),
            reason: "must be positive".into(),
        });
    }
    let start = Instant::now();
    let mut records = Vec::new();
    let mut tables = Vec::new();
    let mut timing = Timing::default();
    for module in suite.modules() {
        let t0 = Instant::now();
        let mut checker = Checker::new(cfg, tol_scale);
        match module {
            Suite::Core => basis::run(&mut checker),
            Suite::Conv => conv::run(&mut checker),
            Suite::Groups => groups::run(&mut checker),
            Suite::Wiener => wiener::run(&mut checker),
            Suite::Bergman => bergman::run(&mut checker),
            Suite::All => unreachable!("expanded by modules()"),
        }
        records.extend(checker.records);
        tables.extend(checker.tables);
        timing.modules.push((module.name().to_string(), t0.elapsed().as_secs_f64()));
    }
    timing.total_seconds = start.elapsed().as_secs_f64();
    Ok(SuiteRun {
        report: Report::new(suite.name(), records, Environment::new(cfg, tol_scale), timing),
        tables,
    })
}

pub use conv::truncation_errors;
pub(crate) use wiener::{approx_identity_study, error_rows_table, sot_study, stage_rows};
