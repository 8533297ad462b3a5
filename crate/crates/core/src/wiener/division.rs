//! Spectral division `ĥ = f̂/ψ̂` on the support of `f̂`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

use super::grid::SpectralGrid;
use super::spectrum::{norm_sqr_real, PolarRule, SpectralFunction};

/// Smallest admissible `|ψ̂|` cofactor on `supp f̂`.
pub const REGULARITY_THRESHOLD: f64 = 1e-12;

/// Where and how close the divisor comes to vanishing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisionReport {
    /// `min |ψ̂|` over lattice points of `supp f̂` (may underflow to 0).
    pub min_abs: f64,
    pub log10_min_abs: f64,
    /// Minimum of the non-Gaussian cofactor, the quantity held to the threshold.
    pub min_cofactor: f64,
    pub location: Vec<f64>,
    /// `log10 max |ĥ/f̂|` over the support.
    pub log10_amplification: f64,
    pub threshold: f64,
}

/// `h` with `ψ ∗ h = f`.
#[derive(Clone, Debug)]
pub struct WienerQuotient {
    pub h: SpectralFunction,
    pub report: DivisionReport,
}

/// Divides `f̂` by `ψ̂` with a hard zero outside `supp f̂`.
///
/// The Gaussian parts cancel exactly; only the cofactor of `ψ̂` is held to the
/// threshold, while the full `min |ψ̂|` is reported in log form.
pub fn wiener_divide(
    f: &SpectralFunction,
    psi: &SpectralFunction,
    grid: &SpectralGrid,
) -> Result<WienerQuotient> {
    let Some(r) = f.support() else {
        return Err(Error::UnsupportedSpectrum);
    };
    if r > grid.nyquist() {
        return Err(Error::DilationTooSmall {
            t: 1.0 / r,
            support: r,
            nyquist: grid.nyquist(),
        });
    }
    let mut min_cof = f64::INFINITY;
    let mut min_log = f64::INFINITY;
    let mut location = vec![0.0; grid.real_dim()];
    let mut min_cof_location = location.clone();
    for xi in grid.frequencies() {
        if norm_sqr_real(&xi) > r * r || f.cofactor(&xi) == C64::new(0.0, 0.0) {
            continue;
        }
        let cof = psi.cofactor(&xi).norm();
        if cof < min_cof || cof.is_nan() {
            min_cof = cof;
            min_cof_location = xi.clone();
        }
        let lg = psi.log10_abs(&xi);
        if lg < min_log {
            min_log = lg;
            location = xi;
        }
    }
    // NaN marks a divisor sampled off its lattice.
    if min_cof.is_nan() || min_cof <= REGULARITY_THRESHOLD {
        return Err(Error::DivisionRejected {
            min_abs: min_cof,
            log10_min: min_cof.log10(),
            threshold: REGULARITY_THRESHOLD,
            location: min_cof_location,
        });
    }
    let h = f.quotient_unchecked(psi);
    let amp = max_log10_gain(psi, r, grid);
    Ok(WienerQuotient {
        h,
        report: DivisionReport {
            min_abs: 10f64.powf(min_log),
            log10_min_abs: min_log,
            min_cofactor: min_cof,
            location,
            log10_amplification: amp,
            threshold: REGULARITY_THRESHOLD,
        },
    })
}

fn max_log10_gain(psi: &SpectralFunction, r: f64, grid: &SpectralGrid) -> f64 {
    grid.frequencies()
        .filter(|xi| norm_sqr_real(xi) <= r * r)
        .map(|xi| -psi.log10_abs(&xi))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `‖ψ∗h − f‖_∞` on the refined grid, with `ψ∗h` formed as the inverse
/// transform of `ψ̂ · ĥ`.
pub fn division_residual(
    q: &WienerQuotient,
    f: &SpectralFunction,
    psi: &SpectralFunction,
    grid: &SpectralGrid,
) -> Result<f64> {
    let fine = grid.refined();
    let recon = psi.product(&q.h).to_grid(&fine)?;
    let target = f.to_grid(&fine)?;
    Ok(recon.sup_distance(&target))
}

/// Angular variation of `h` on circles, relative to `max |h|` over the samples.
pub fn radial_variation(h: &SpectralFunction, radii: &[f64], angles: usize, rule: &PolarRule) -> Result<f64> {
    let ev = h.evaluator(rule)?;
    let mut scale = ev.eval(&[C64::new(0.0, 0.0)]).norm();
    let mut spread = 0.0_f64;
    for &r in radii {
        let vals: Vec<C64> = (0..angles)
            .map(|k| {
                let th = 2.0 * PI * (k as f64 + 0.5) / angles as f64 + 0.1234;
                ev.eval(&[C64::from_polar(r, th)])
            })
            .collect();
        for v in &vals {
            scale = scale.max(v.norm());
            for w in &vals {
                spread = spread.max((v - w).norm());
            }
        }
    }
    Ok(if scale == 0.0 { 0.0 } else { spread / scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiener::identity::approx_identity;

    #[test]
    fn divides_band_limited_identity_by_phi() {
        let grid = SpectralGrid::new(1, 6.0, 256).unwrap();
        let phi = SpectralFunction::phi(1);
        for t in [1.0, 0.5, 0.25, 0.125] {
            let f = approx_identity(1, t, &grid).unwrap().spectrum();
            let q = wiener_divide(&f, &phi, &grid).unwrap();
            // ĥ = f̂ e^{π|ξ|²}
            let xi = [0.3 / t, -0.2 / t];
            let expect = f.value(&xi).re * (PI * norm_sqr_real(&xi)).exp();
            assert!((q.h.value(&xi).re - expect).abs() <= 1e-12 * expect.abs());
            let res = division_residual(&q, &f, &phi, &grid).unwrap();
            assert!(res < 1e-8, "t = {t}: residual {res:e}");
            assert!(q.report.log10_amplification > 0.0);
        }
    }

    #[test]
    fn recovers_known_factor() {
        // f = φ ∗ g with ĝ band-limited: h = g.
        let grid = SpectralGrid::new(1, 6.0, 128).unwrap();
        let phi = SpectralFunction::phi(1);
        let g = approx_identity(1, 0.5, &grid).unwrap().spectrum();
        let f = phi.product(&g);
        let q = wiener_divide(&f, &phi, &grid).unwrap();
        let hs = q.h.to_grid(&grid).unwrap();
        let gs = g.to_grid(&grid).unwrap();
        assert!(hs.sup_distance(&gs) < 1e-8);
    }

    #[test]
    fn rejects_vanishing_divisor() {
        let grid = SpectralGrid::new(1, 6.0, 128).unwrap();
        let narrow = approx_identity(1, 1.0, &grid).unwrap().spectrum();
        let wide = approx_identity(1, 0.25, &grid).unwrap().spectrum();
        match wiener_divide(&wide, &narrow, &grid) {
            Err(Error::DivisionRejected { min_abs, location, .. }) => {
                assert_eq!(min_abs, 0.0);
                assert!(norm_sqr_real(&location).sqrt() >= 1.0);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(matches!(wiener_divide(&phi_no_support(), &narrow, &grid), Err(Error::UnsupportedSpectrum)));
    }

    fn phi_no_support() -> SpectralFunction {
        SpectralFunction::phi(1)
    }

    #[test]
    fn quotient_of_radial_inputs_is_radial() {
        let grid = SpectralGrid::new(1, 6.0, 256).unwrap();
        let phi = SpectralFunction::phi(1);
        for t in [1.0, 0.125] {
            let f = approx_identity(1, t, &grid).unwrap().spectrum();
            let q = wiener_divide(&f, &phi, &grid).unwrap();
            let v = radial_variation(&q.h, &[0.5, 1.0, 1.5], 32, &PolarRule::default()).unwrap();
            assert!(v < 1e-10, "t = {t}: {v:e}");
        }
    }
}
