//! Acceptance suite: every criterion at its stated tolerance, one line each.
//!
//! Runs without the libtest harness so the per-criterion lines are always
//! printed; the process fails if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use qhalab_cli::suites::truncation_errors;
use qhalab_cli::{run_suite, CheckRecord, RunConfig, Suite, SuiteRun};

const TRUNCATIONS: [usize; 5] = [8, 12, 16, 20, 24];
/// Errors below this are roundoff; monotonicity is required above it.
const ROUNDOFF_FLOOR: f64 = 1e-12;

struct Verdict {
    criterion: u8,
    pass: bool,
    detail: String,
}

fn from_records(criterion: u8, records: &[&CheckRecord]) -> Verdict {
    if records.is_empty() {
        return Verdict {
            criterion,
            pass: false,
            detail: "no checks recorded".into(),
        };
    }
    let failed: Vec<String> = records.iter().filter(|r| !r.pass).map(|r| r.summary()).collect();
    let worst = records
        .iter()
        .filter_map(|r| r.measured.map(|m| (r, m)))
        .filter(|(r, _)| r.tolerance > 0.0)
        .map(|(r, m)| (m / r.tolerance, r.id.as_str()))
        .fold((f64::NEG_INFINITY, ""), |a, b| if b.0 > a.0 { b } else { a });
    let detail = if failed.is_empty() {
        format!("{} checks, tightest {} at {:.2e} of its bound", records.len(), worst.1, worst.0)
    } else {
        format!("{} of {} checks failed: {}", failed.len(), records.len(), failed.join("; "))
    };
    Verdict {
        criterion,
        pass: failed.is_empty(),
        detail,
    }
}

/// Per identity, each error may exceed its predecessor only while both sit
/// under the roundoff floor.
fn truncation_verdict(cfg: &RunConfig) -> Verdict {
    let mut series: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for d in TRUNCATIONS {
        match truncation_errors(cfg, d) {
            Ok(rows) => {
                for (id, e) in rows {
                    series.entry(id).or_default().push((d, e));
                }
            }
            Err(e) => {
                return Verdict {
                    criterion: 8,
                    pass: false,
                    detail: format!("degree {d}: {e}"),
                }
            }
        }
    }
    let mut bad = Vec::new();
    let mut above_floor = 0;
    for (id, s) in &series {
        if s.iter().any(|&(_, e)| e > ROUNDOFF_FLOOR) {
            above_floor += 1;
        }
        for w in s.windows(2) {
            let ((d0, e0), (d1, e1)) = (w[0], w[1]);
            if !e1.is_finite() || e1 > e0.max(ROUNDOFF_FLOOR) {
                bad.push(format!("{id}: N={d0} {e0:.2e} -> N={d1} {e1:.2e}"));
            }
        }
    }
    Verdict {
        criterion: 8,
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!(
                "{} identities over N = {TRUNCATIONS:?}, {above_floor} above the {ROUNDOFF_FLOOR:.0e} floor, all non-increasing",
                series.len()
            )
        } else {
            format!("increases: {}", bad.join("; "))
        },
    }
}

fn determinism_verdict(first: &SuiteRun, second: &SuiteRun) -> Verdict {
    let mut diffs = Vec::new();
    match (first.report.deterministic_json(), second.report.deterministic_json()) {
        (Ok(a), Ok(b)) if a == b => {}
        (Ok(_), Ok(_)) => diffs.push("report".to_string()),
        (Err(e), _) | (_, Err(e)) => diffs.push(format!("serialization: {e}")),
    }
    if first.tables.len() != second.tables.len() {
        diffs.push("table count".into());
    }
    for (a, b) in first.tables.iter().zip(&second.tables) {
        if a.name != b.name || a.to_csv().ok() != b.to_csv().ok() {
            diffs.push(format!("table {}", a.name));
        }
    }
    Verdict {
        criterion: 9,
        pass: diffs.is_empty(),
        detail: if diffs.is_empty() {
            format!(
                "two runs byte-identical apart from timing ({} records, {} tables)",
                first.report.records.len(),
                first.tables.len()
            )
        } else {
            format!("runs differ: {}", diffs.join(", "))
        },
    }
}

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let start = Instant::now();
    let first = match run_suite(&cfg, Suite::All, 1.0) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance: suite could not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut verdicts: Vec<Verdict> = (1..=7)
        .map(|c| {
            let recs: Vec<&CheckRecord> = first.report.records.iter().filter(|r| r.criterion == Some(c)).collect();
            from_records(c, &recs)
        })
        .collect();
    verdicts.push(truncation_verdict(&cfg));
    verdicts.push(match run_suite(&cfg, Suite::All, 1.0) {
        Ok(second) => determinism_verdict(&first, &second),
        Err(e) => Verdict {
            criterion: 9,
            pass: false,
            detail: format!("second run failed: {e}"),
        },
    });

    for v in &verdicts {
        println!("criterion {}: {} {}", v.criterion, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    let passed = verdicts.iter().filter(|v| v.pass).count();
    println!(
        "acceptance: {passed} of {} criteria passed in {:.0} s",
        verdicts.len(),
        start.elapsed().as_secs_f64()
    );
    if passed == verdicts.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
