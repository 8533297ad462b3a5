//! Check records and suite reports.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// How a measurement is compared with its bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `measured ≤ tolerance`.
    AtMost,
    /// `measured < tolerance`.
    Below,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The identity being checked, as a formula.
    pub anchor: String,
    /// Acceptance criterion the check belongs to, if any.
    pub criterion: Option<u8>,
    /// `None` when the check could not be evaluated.
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(id: &str, anchor: &str, criterion: Option<u8>, measured: f64, tolerance: f64, relation: Relation) -> Self {
        let pass = measured.is_finite()
            && match relation {
                Relation::AtMost => measured <= tolerance,
                Relation::Below => measured < tolerance,
            };
        CheckRecord {
            id: id.to_string(),
            anchor: anchor.to_string(),
            criterion,
            measured: measured.is_finite().then_some(measured),
            tolerance,
            relation,
            pass,
            note: None,
        }
    }

    /// A check whose computation raised an error.
    pub fn failed(id: &str, anchor: &str, criterion: Option<u8>, tolerance: f64, reason: String) -> Self {
        CheckRecord {
            id: id.to_string(),
            anchor: anchor.to_string(),
            criterion,
            measured: None,
            tolerance,
            relation: Relation::AtMost,
            pass: false,
            note: Some(reason),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn summary(&self) -> String {
        let measured = self.measured.map_or("n/a".to_string(), |m| format!("{m:.3e}"));
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::Below => "<",
        };
        format!(
            "{} {}: {} {} {:.3e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            measured,
            rel,
            self.tolerance
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub config: RunConfig,
    pub profile_version: String,
    pub seed: u64,
    pub group_seed: u64,
    pub tol_scale: f64,
    pub crate_version: String,
}

impl Environment {
    pub fn new(config: &RunConfig, tol_scale: f64) -> Self {
        Environment {
            config: config.clone(),
            profile_version: qhalab::wiener::PROFILE_VERSION.to_string(),
            seed: config.seed,
            group_seed: config.group_seed(),
            tol_scale,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Wall-clock seconds per module; the only non-deterministic part of a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub modules: Vec<(String, f64)>,
    pub total_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub pass: bool,
    pub records: Vec<CheckRecord>,
    pub environment: Environment,
    pub timing: Timing,
}

impl Report {
    pub fn new(suite: &str, records: Vec<CheckRecord>, environment: Environment, timing: Timing) -> Self {
        Report {
            suite: suite.to_string(),
            pass: records.iter().all(|r| r.pass),
            records,
            environment,
            timing,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// The report without its timing block, for reproducibility comparisons.
    pub fn deterministic_json(&self) -> serde_json::Result<String> {
        let mut value = serde_json::to_value(self)?;
        if let Some(obj) = value.as_object_mut() {
            obj.remove("timing");
        }
        serde_json::to_string_pretty(&value)
    }
}
