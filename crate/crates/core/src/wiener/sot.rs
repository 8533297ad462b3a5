//! Toeplitz approximation of an operator in the strong operator topology.
//!
//! For each `t`: `ψ_t ∗ S = h_t ∗ (φ ∗ S) = h_t ∗ T_{B(S)} = T_{h_t ∗ B(S)}` with
//! `φ ∗ h_t = f_t`. Spectrally `â_t = ĥ_t · B̂(S) = f̂_t · tr(S Ŵ_{iξ})`, the
//! Gaussian factors cancelling exactly. The reference `f_t ∗ S` is summed in
//! real space over the grid nodes.

use serde::{Deserialize, Serialize};

use crate::conv::translation_sum;
use crate::error::{Error, Result};
use crate::linalg::{max_abs, C64};
use crate::operators::{berezin, toeplitz_from_spectrum, OperatorMatrix};
use crate::symbol::{Symbol, SymbolKind};

use super::division::{wiener_divide, DivisionReport};
use super::grid::SpectralGrid;
use super::identity::approx_identity;
use super::spectrum::{norm_sqr_real, SpectralFunction};

/// Boundary-to-peak ratio of `|B̂(S)|` above which the grid is called too coarse.
pub const ALIASING_LIMIT: f64 = 1e-8;

/// One `t` of the pipeline.
#[derive(Clone, Debug)]
pub struct SotStage {
    pub t: f64,
    /// Spectrum of the symbol `a_t = h_t ∗ B(S)`.
    pub symbol: SpectralFunction,
    /// `T_{a_t}`.
    pub toeplitz: OperatorMatrix,
    /// `f_t ∗ S` summed over grid nodes.
    pub reference: OperatorMatrix,
    /// Leading-block `max |T_{a_t} − f_t ∗ S|`.
    pub pipeline_error: f64,
    /// `‖(T_{a_t} − S) e_j‖` for the test vectors.
    pub errors: Vec<f64>,
    pub division: DivisionReport,
    /// `max |B̂(S)|` on the outermost frequency shell relative to its peak.
    pub aliasing: f64,
    pub diagnostics: Vec<String>,
}

/// Row of an error table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub t: f64,
    pub vector: usize,
    pub error: f64,
}

pub fn error_table(stages: &[(f64, Vec<f64>)]) -> Vec<ErrorRow> {
    stages
        .iter()
        .flat_map(|(t, errs)| {
            errs.iter().enumerate().map(move |(j, e)| ErrorRow {
                t: *t,
                vector: j,
                error: *e,
            })
        })
        .collect()
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("t schedule is empty".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(format!("t schedule {schedule:?} is not decreasing")));
    }
    Ok(())
}

fn column_errors(diff: &OperatorMatrix, count: usize) -> Vec<f64> {
    (0..count.min(diff.dim()))
        .map(|j| diff.entries().column(j).norm())
        .collect()
}

fn complex_freq(xi: &[f64]) -> Vec<C64> {
    xi.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

/// `f_t ∗ S` with `f_t` the grid samples (the `2R`-periodization).
pub fn conv_band_limited(s: &OperatorMatrix, t: f64, grid: &SpectralGrid) -> Result<OperatorMatrix> {
    let space = s.space();
    space.require_fock("conv_band_limited")?;
    let f = approx_identity(space.n(), t, grid)?.samples(grid)?;
    let w = grid.step().powi(grid.real_dim() as i32);
    let coeffs: Vec<C64> = f.values.iter().map(|v| v * w).collect();
    let nodes: Vec<Vec<C64>> = grid.nodes().collect();
    let (m, _) = translation_sum(space, s.entries(), &nodes, &coeffs);
    Ok(OperatorMatrix::from_parts(space.clone(), m))
}

/// Runs the pipeline for every `t` of a decreasing schedule, measuring
/// `‖(T_{a_t} − S) e_j‖` for `j < tests`.
pub fn sot_toeplitz_approximation(
    s: &OperatorMatrix,
    schedule: &[f64],
    grid: &SpectralGrid,
    tests: usize,
) -> Result<Vec<SotStage>> {
    let space = s.space();
    space.require_fock("sot_toeplitz_approximation")?;
    check_schedule(schedule)?;
    let n = space.n();
    if grid.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: grid.n,
        });
    }
    let b = berezin(space, s)?;
    let bs = {
        let b = b.clone();
        SpectralFunction::analytic("B(S)", n, 1.0, None, false, move |xi| {
            b.spectral_cofactor(&complex_freq(xi)).expect("operator source")
        })
    };
    let aliasing = shell_ratio(&bs, grid);
    let phi = SpectralFunction::phi(n);
    let cell = grid.freq_step().powi(grid.real_dim() as i32);
    let mut out = Vec::with_capacity(schedule.len());
    for &t in schedule {
        let f = approx_identity(n, t, grid)?.spectrum();
        let q = wiener_divide(&f, &phi, grid)?;
        let a = q.h.product(&bs).with_label(format!("a_t(t={t})"));
        let r2 = f.support().unwrap_or(f64::INFINITY).powi(2);
        let terms: Vec<(Vec<C64>, C64)> = grid
            .frequencies()
            .filter(|xi| norm_sqr_real(xi) <= r2)
            .map(|xi| {
                let c = a.value(&xi) * cell;
                (complex_freq(&xi), c)
            })
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .collect();
        let toeplitz = toeplitz_from_spectrum(space, &terms)?;
        let reference = conv_band_limited(s, t, grid)?;
        let pipeline_error = max_abs(&(toeplitz.leading() - reference.leading()));
        let errors = column_errors(&toeplitz.sub(s), tests);
        let mut diagnostics = Vec::new();
        if aliasing > ALIASING_LIMIT {
            diagnostics.push(format!(
                "grid too coarse for B(S): shell-to-peak spectral ratio {aliasing:.3e}"
            ));
        }
        out.push(SotStage {
            t,
            symbol: a,
            toeplitz,
            reference,
            pipeline_error,
            errors,
            division: q.report,
            aliasing,
            diagnostics,
        });
    }
    Ok(out)
}

/// `‖(f_t ∗ S − S) e_j‖` along the schedule.
pub fn approx_identity_sot_check(
    s: &OperatorMatrix,
    schedule: &[f64],
    grid: &SpectralGrid,
    tests: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    check_schedule(schedule)?;
    schedule
        .iter()
        .map(|&t| {
            let c = conv_band_limited(s, t, grid)?;
            Ok((t, column_errors(&c.sub(s), tests)))
        })
        .collect()
}

/// Symbol `a_t` on `ℂⁿ` from its lattice spectrum (periodic with period `2R`).
pub fn lattice_symbol(a: &SpectralFunction, grid: &SpectralGrid) -> Symbol {
    let cell = grid.freq_step().powi(grid.real_dim() as i32);
    let r2 = a.support().unwrap_or(f64::INFINITY).powi(2);
    let terms: Vec<(Vec<f64>, C64)> = grid
        .frequencies()
        .filter(|xi| norm_sqr_real(xi) <= r2)
        .map(|xi| {
            let v = a.value(&xi) * cell;
            (xi, v)
        })
        .filter(|(_, v)| *v != C64::new(0.0, 0.0))
        .collect();
    Symbol::from_fn(a.label(), SymbolKind::GridSampled, a.n(), move |z| {
        terms
            .iter()
            .map(|(xi, v)| v * super::grid::character(z, xi).conj())
            .sum()
    })
    .with_radial(a.is_radial())
}

fn shell_ratio(f: &SpectralFunction, grid: &SpectralGrid) -> f64 {
    let edge = grid.nyquist();
    let mut peak = 0.0_f64;
    let mut shell = 0.0_f64;
    let m = grid.points;
    // Axis lines through the origin and the outermost shell of each axis.
    for k in 0..m {
        let x = grid.freq(k);
        for xi in [vec![x, 0.0], vec![0.0, x], vec![-edge, x], vec![x, -edge]] {
            let mut full = vec![0.0; grid.real_dim()];
            full[..2].copy_from_slice(&xi);
            let v = f.value(&full).norm();
            peak = peak.max(v);
            if full.iter().any(|c| (c.abs() - edge).abs() < 1e-12) {
                shell = shell.max(v);
            }
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        shell / peak
    }
}
