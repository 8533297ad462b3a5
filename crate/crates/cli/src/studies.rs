//! Convergence studies producing CSV tables.

use std::str::FromStr;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::suites::{approx_identity_study, error_rows_table, sot_study, stage_rows, truncation_errors};
use crate::table::Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Study {
    Sot,
    ApproxIdentity,
    Truncation,
}

impl Study {
    pub const NAMES: [&'static str; 3] = ["sot", "approx_identity", "truncation"];
}

impl FromStr for Study {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "sot" => Ok(Study::Sot),
            "approx_identity" => Ok(Study::ApproxIdentity),
            "truncation" => Ok(Study::Truncation),
            _ => Err(CliError::UnknownName {
                what: "study",
                name: s.to_string(),
                expected: Study::NAMES.join(", "),
            }),
        }
    }
}

/// Error-versus-parameter tables: over the `t` schedule for `sot` and
/// `approx_identity`, over the truncation degrees for `truncation`.
pub fn run_convergence(cfg: &RunConfig, study: Study) -> Result<Vec<Table>, CliError> {
    cfg.validate()?;
    match study {
        Study::Sot => Ok(sot_study(cfg)?
            .iter()
            .map(|(name, stages)| error_rows_table(&format!("sot_{name}"), &stage_rows(stages)))
            .collect()),
        Study::ApproxIdentity => Ok(approx_identity_study(cfg)?
            .iter()
            .map(|(name, rows)| error_rows_table(&format!("approx_identity_{name}"), rows))
            .collect()),
        Study::Truncation => {
            let mut t = Table::new("truncation", &["degree", "identity", "error"]);
            for &d in &cfg.wiener.truncations {
                for (identity, err) in truncation_errors(cfg, d)? {
                    t.push(vec![d.to_string(), identity, format!("{err:e}")]);
                }
            }
            Ok(vec![t])
        }
    }
}
