//! Radial approximate identity with compactly supported spectrum.

use crate::error::{Error, Result};
use crate::linalg::C64;

use super::grid::{GridFunction, SpectralGrid};
use super::spectrum::{norm_sqr_real, SpectralFunction};

/// Identifies the bump profile in reports.
pub const PROFILE_VERSION: &str = "smoothstep-exp/1";

fn flat(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// `C^∞` profile of `|ξ|`: `1` on `[0, 1/2]`, `0` on `[1, ∞)`, monotone between.
pub fn bump(r: f64) -> f64 {
    if r <= 0.5 {
        return 1.0;
    }
    if r >= 1.0 {
        return 0.0;
    }
    let a = flat(1.0 - r);
    a / (a + flat(r - 0.5))
}

/// The member `f_t` with `f̂_t(ξ) = bump(t|ξ|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandLimitedFamily {
    pub n: usize,
    pub t: f64,
}

impl BandLimitedFamily {
    /// Spectral radius `1/t`.
    pub fn support(&self) -> f64 {
        1.0 / self.t
    }

    pub fn spectrum(&self) -> SpectralFunction {
        let t = self.t;
        SpectralFunction::analytic(
            format!("f_t(t={t})"),
            self.n,
            0.0,
            Some(1.0 / t),
            true,
            move |xi| C64::new(bump(t * norm_sqr_real(xi).sqrt()), 0.0),
        )
    }

    /// Samples of the `2R`-periodization of `f_t`.
    pub fn samples(&self, grid: &SpectralGrid) -> Result<GridFunction> {
        self.spectrum().to_grid(grid)
    }
}

/// `f_t`, rejected when its spectral support passes the grid's Nyquist limit.
pub fn approx_identity(n: usize, t: f64, grid: &SpectralGrid) -> Result<BandLimitedFamily> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("dilation t = {t} must be positive")));
    }
    if grid.n != n {
        return Err(Error::DimensionMismatch {
            expected: grid.n,
            actual: n,
        });
    }
    if 1.0 / t > grid.nyquist() {
        return Err(Error::DilationTooSmall {
            t,
            support: 1.0 / t,
            nyquist: grid.nyquist(),
        });
    }
    Ok(BandLimitedFamily { n, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiener::spectrum::PolarRule;

    #[test]
    fn profile_shape() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(0.5), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert!((bump(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=200 {
            let v = bump(0.5 + k as f64 / 400.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn unit_mass_and_support() {
        let grid = SpectralGrid::new(1, 6.0, 256).unwrap();
        for t in [1.0, 0.5, 0.25, 0.125] {
            let f = approx_identity(1, t, &grid).unwrap();
            let s = f.spectrum();
            assert_eq!(s.value(&[0.0, 0.0]).re, 1.0);
            assert_eq!(s.value(&[1.0 / t + 1e-9, 0.0]).norm(), 0.0);
            let mass = f.samples(&grid).unwrap().integral();
            assert!((mass - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
        assert!(approx_identity(1, 0.05, &grid).is_err());
        assert!(approx_identity(1, 0.0, &grid).is_err());
    }

    #[test]
    fn dilation_law() {
        let grid = SpectralGrid::new(1, 6.0, 64).unwrap();
        let rule = PolarRule::default();
        let f1 = approx_identity(1, 1.0, &grid).unwrap().spectrum().evaluator(&rule).unwrap();
        let fh = approx_identity(1, 0.5, &grid).unwrap().spectrum().evaluator(&rule).unwrap();
        for z in [C64::new(0.0, 0.0), C64::new(0.3, 0.2), C64::new(-0.7, 0.4)] {
            let lhs = fh.eval(&[z]);
            let rhs = f1.eval(&[z * 2.0]) * 4.0;
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
