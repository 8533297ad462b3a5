use qhalab::wiener::{
    approx_identity_sot_check, division_residual, error_table, radial_variation, ErrorRow, PolarRule, SotStage,
    ALIASING_LIMIT,
};
use qhalab::{approx_identity, sot_toeplitz_approximation, wiener_divide, Error, SpectralFunction, SpectralGrid, TruncatedSpace};

use std::f64::consts::PI;

use qhalab::fock::norm_sqr;
use qhalab::C64;
use rayon::prelude::*;

use super::{Checker, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::fixtures::sot_operators;
use crate::table::Table;

const SOT_ANCHOR: &str = "psi_t * S -> S in the strong operator topology";
const PIPELINE_ANCHOR: &str = "f_t * S = T_{h_t * B(S)}";

fn grid(cfg: &RunConfig) -> Result<SpectralGrid, CliError> {
    Ok(SpectralGrid::new(1, cfg.grid.radius, cfg.grid.points)?)
}

pub(crate) fn stage_rows(stages: &[SotStage]) -> Vec<ErrorRow> {
    let pairs: Vec<(f64, Vec<f64>)> = stages.iter().map(|s| (s.t, s.errors.clone())).collect();
    error_table(&pairs)
}

/// Error tables `(t, vector, error)` of the Toeplitz approximation, per operator.
pub(crate) fn sot_study(cfg: &RunConfig) -> Result<Vec<(String, Vec<SotStage>)>, CliError> {
    let grid = grid(cfg)?;
    let space = TruncatedSpace::fock(1, cfg.wiener.degree)?;
    sot_operators(&space)?
        .into_iter()
        .map(|(name, s)| {
            let stages = sot_toeplitz_approximation(&s, &cfg.wiener.t_schedule, &grid, cfg.wiener.tests)?;
            Ok((name, stages))
        })
        .collect()
}

/// Error tables of `f_t ∗ S − S`, per operator.
pub(crate) fn approx_identity_study(cfg: &RunConfig) -> Result<Vec<(String, Vec<ErrorRow>)>, CliError> {
    let grid = grid(cfg)?;
    let space = TruncatedSpace::fock(1, cfg.wiener.degree)?;
    sot_operators(&space)?
        .into_iter()
        .map(|(name, s)| {
            let errs = approx_identity_sot_check(&s, &cfg.wiener.t_schedule, &grid, cfg.wiener.tests)?;
            Ok((name, error_table(&errs)))
        })
        .collect()
}

pub(crate) fn error_rows_table(name: &str, rows: &[ErrorRow]) -> Table {
    let mut t = Table::new(name, &["t", "vector", "error"]);
    for r in rows {
        t.push(vec![format!("{:e}", r.t), r.vector.to_string(), format!("{:e}", r.error)]);
    }
    t
}

/// Largest `log10 |h^/f^|` for which the spatial cross-check is meaningful.
const SPATIAL_AMPLIFICATION: f64 = 6.0;
const SPATIAL_TARGETS: f64 = 1.5;

/// `max |Σ_y h(y) phi(x - y) dy - f(x)|` over fine-grid nodes with `|x| ≤ 1.5`.
fn spatial_residual(h: &SpectralFunction, f: &SpectralFunction, fine: &SpectralGrid) -> Result<f64, CliError> {
    let hv = h.to_grid(fine)?;
    let fv = f.to_grid(fine)?;
    let cell = fine.step().powi(fine.real_dim() as i32);
    let nodes: Vec<Vec<C64>> = fine.nodes().collect();
    let targets: Vec<usize> = (0..nodes.len())
        .filter(|&i| norm_sqr(&nodes[i]) <= SPATIAL_TARGETS * SPATIAL_TARGETS)
        .step_by(97)
        .collect();
    let worst = targets
        .par_iter()
        .map(|&i| {
            let x = &nodes[i];
            let conv: C64 = nodes
                .iter()
                .zip(&hv.values)
                .map(|(y, hy)| {
                    let d: Vec<C64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                    hy * (-PI * norm_sqr(&d)).exp()
                })
                .sum();
            (conv * cell - fv.values[i]).norm()
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

pub(super) fn run(c: &mut Checker) {
    let cfg = c.cfg;
    let schedule = cfg.wiener.t_schedule.clone();
    let phi = SpectralFunction::phi(1);

    for &t in &schedule {
        let quotient = grid(cfg).and_then(|g| {
            let f = approx_identity(1, t, &g)?.spectrum();
            let q = wiener_divide(&f, &phi, &g)?;
            Ok((g, f, q))
        });
        let quotient = quotient.map_err(|e| e.to_string());
        c.check(&format!("wiener.division.t={t}"), "phi * h_t = f_t", Some(5), 1e-8, || {
            let (g, f, q) = quotient.as_ref().map_err(|e| CliError::Failed(e.clone()))?;
            Ok(Outcome::value(division_residual(q, f, &phi, g)?)
                .note(format!("log10 amplification {:.2}", q.report.log10_amplification)))
        });
        // Independent of the spectral bookkeeping: a spatial Riemann sum of
        // phi * h, usable while h stays within double range of f.
        let amplified = quotient.as_ref().map_or(true, |(_, _, q)| q.report.log10_amplification > SPATIAL_AMPLIFICATION);
        if !amplified {
            c.check(&format!("wiener.division.spatial.t={t}"), "phi * h_t = f_t", None, 1e-8, || {
                let (g, f, q) = quotient.as_ref().map_err(|e| CliError::Failed(e.clone()))?;
                Ok(Outcome::value(spatial_residual(&q.h, f, &g.refined())?))
            });
        }
        c.check(&format!("wiener.radial.t={t}"), "h_t is radial", Some(5), 1e-10, || {
            let (_, _, q) = quotient.as_ref().map_err(|e| CliError::Failed(e.clone()))?;
            Ok(Outcome::value(radial_variation(&q.h, &[0.3, 0.7, 1.2], 16, &PolarRule::default())?))
        });
    }

    c.check("wiener.division.rejects_zeros", "division needs psi^ without zeros", None, 0.0, || {
        let g = grid(cfg)?;
        let narrow = approx_identity(1, 1.0, &g)?.spectrum();
        let wide = approx_identity(1, 0.5, &g)?.spectrum();
        Ok(match wiener_divide(&wide, &narrow, &g) {
            Err(Error::DivisionRejected { .. }) => Outcome::value(0.0),
            Err(e) => Outcome::value(1.0).note(format!("unexpected error: {e}")),
            Ok(_) => Outcome::value(1.0).note("division by a vanishing spectrum was accepted"),
        })
    });

    let studies = match sot_study(cfg) {
        Ok(s) => s,
        Err(e) => {
            c.check("wiener.sot", SOT_ANCHOR, Some(6), 1e-3, || Err(e));
            return;
        }
    };
    let tests = cfg.wiener.tests;
    for (name, stages) in &studies {
        let first = &stages[0];
        let last = &stages[stages.len() - 1];
        if stages.len() > 1 {
            for j in 0..tests.min(first.errors.len()) {
                c.check(&format!("wiener.sot.{name}.decrease.j={j}"), SOT_ANCHOR, Some(6), 0.0, || {
                    Ok(Outcome::below(last.errors[j], first.errors[j]))
                });
            }
        }
        c.check(&format!("wiener.sot.{name}.final"), SOT_ANCHOR, Some(6), 1e-3, || {
            Ok(Outcome::value(last.errors.iter().copied().fold(0.0, f64::max)))
        });
        c.check(&format!("wiener.sot.{name}.pipeline"), PIPELINE_ANCHOR, Some(6), 1e-5, || {
            Ok(Outcome::value(stages.iter().map(|s| s.pipeline_error).fold(0.0, f64::max)))
        });
        c.check(&format!("wiener.sot.{name}.aliasing"), "B(S)^ resolved by the grid", None, ALIASING_LIMIT, || {
            Ok(Outcome::value(first.aliasing))
        });
        c.table(error_rows_table(&format!("sot_{name}"), &stage_rows(stages)));
    }

    match approx_identity_study(cfg) {
        Ok(tables) => {
            for (name, rows) in tables {
                let at = |t: f64| rows.iter().filter(|r| r.t == t).map(|r| r.error).fold(0.0, f64::max);
                let (first, last) = (at(schedule[0]), at(schedule[schedule.len() - 1]));
                if schedule.len() > 1 {
                    c.check(&format!("wiener.approx_identity.{name}"), "f_t * S -> S", None, 0.0, || {
                        Ok(Outcome::below(last, first))
                    });
                }
                c.table(error_rows_table(&format!("approx_identity_{name}"), &rows));
            }
        }
        Err(e) => c.check("wiener.approx_identity", "f_t * S -> S", None, 0.0, || Err(e)),
    }
}
