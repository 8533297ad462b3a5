//! Functions described by their spectrum `f̂(ξ) = c(ξ) e^{-π γ |ξ|²}`.
//!
//! The Gaussian exponent `γ` is tracked exactly, so multiplying or dividing by
//! `φ̂ = e^{-π|ξ|²}` only shifts `γ` and never forms the tiny or huge factor
//! explicitly. The cofactor `c` is either a closed form or a lattice of FFT
//! samples (then `γ = 0`).

use std::f64::consts::{LN_10, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::quadrature::gauss_legendre;
use crate::symbol::{Symbol, SymbolKind};

use super::grid::{GridFunction, SpectralGrid};

pub type SpectralFn = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;

/// Non-Gaussian part of a spectrum.
#[derive(Clone)]
pub enum Cofactor {
    Analytic(SpectralFn),
    /// Values on the frequency lattice of `grid`; zero off the lattice range.
    Sampled {
        grid: SpectralGrid,
        values: Arc<Vec<C64>>,
    },
}

/// Band-limited or Gaussian-weighted spectrum with metadata.
#[derive(Clone)]
pub struct SpectralFunction {
    label: String,
    n: usize,
    gauss: f64,
    cofactor: Cofactor,
    support: Option<f64>,
    radial: bool,
}

impl fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralFunction")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("gauss", &self.gauss)
            .field("support", &self.support)
            .field("radial", &self.radial)
            .field("sampled", &matches!(self.cofactor, Cofactor::Sampled { .. }))
            .finish()
    }
}

pub(crate) fn norm_sqr_real(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum()
}

impl SpectralFunction {
    pub fn analytic<F>(
        label: impl Into<String>,
        n: usize,
        gauss: f64,
        support: Option<f64>,
        radial: bool,
        f: F,
    ) -> Self
    where
        F: Fn(&[f64]) -> C64 + Send + Sync + 'static,
    {
        SpectralFunction {
            label: label.into(),
            n,
            gauss,
            cofactor: Cofactor::Analytic(Arc::new(f)),
            support,
            radial,
        }
    }

    /// Spectrum of `e^{-π s|z|²}`: `s^{-n} e^{-π|ξ|²/s}`.
    pub fn gaussian(n: usize, s: f64) -> Self {
        let c = s.powi(-(n as i32));
        SpectralFunction::analytic(format!("gaussian(s={s})"), n, 1.0 / s, None, true, move |_| {
            C64::new(c, 0.0)
        })
    }

    /// `φ̂ = e^{-π|ξ|²}`.
    pub fn phi(n: usize) -> Self {
        SpectralFunction::gaussian(n, 1.0).with_label("phi")
    }

    /// FFT of grid samples; the cofactor is the raw spectrum (`γ = 0`).
    pub fn from_samples(f: &GridFunction) -> Result<Self> {
        let spec = f.grid.forward(&f.values)?;
        Ok(SpectralFunction {
            label: "sampled".into(),
            n: f.grid.n,
            gauss: 0.0,
            cofactor: Cofactor::Sampled {
                grid: f.grid.clone(),
                values: Arc::new(spec),
            },
            support: None,
            radial: false,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_radial(mut self, radial: bool) -> Self {
        self.radial = radial;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Gaussian exponent `γ`.
    pub fn gauss(&self) -> f64 {
        self.gauss
    }

    /// Radius outside which the spectrum vanishes identically.
    pub fn support(&self) -> Option<f64> {
        self.support
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.cofactor, Cofactor::Sampled { .. })
    }

    /// `c(ξ)`; zero outside the support.
    pub fn cofactor(&self, xi: &[f64]) -> C64 {
        if let Some(r) = self.support {
            if norm_sqr_real(xi) > r * r {
                return C64::new(0.0, 0.0);
            }
        }
        match &self.cofactor {
            Cofactor::Analytic(f) => f(xi),
            Cofactor::Sampled { grid, values } => lattice_lookup(grid, values, xi),
        }
    }

    /// `e^{-π γ |ξ|²}`.
    pub fn gauss_factor(&self, xi: &[f64]) -> f64 {
        (-PI * self.gauss * norm_sqr_real(xi)).exp()
    }

    /// `f̂(ξ)`.
    pub fn value(&self, xi: &[f64]) -> C64 {
        let c = self.cofactor(xi);
        if c == C64::new(0.0, 0.0) {
            return c;
        }
        c * self.gauss_factor(xi)
    }

    /// `log10 |f̂(ξ)|`, finite even where `|f̂|` underflows.
    pub fn log10_abs(&self, xi: &[f64]) -> f64 {
        let c = self.cofactor(xi).norm();
        if c == 0.0 {
            return f64::NEG_INFINITY;
        }
        c.log10() - PI * self.gauss * norm_sqr_real(xi) / LN_10
    }

    /// Spectrum sampled on the grid's frequency lattice.
    pub fn sample(&self, grid: &SpectralGrid) -> Vec<C64> {
        grid.frequencies().map(|xi| self.value(&xi)).collect()
    }

    /// Spatial samples by inverse FFT (the `2R`-periodization of the function).
    pub fn to_grid(&self, grid: &SpectralGrid) -> Result<GridFunction> {
        let values = grid.inverse(&self.sample(grid))?;
        Ok(GridFunction {
            grid: grid.clone(),
            values,
        })
    }

    /// Spectrum of the convolution `f ∗ g`.
    pub fn product(&self, other: &SpectralFunction) -> SpectralFunction {
        let a = self.clone();
        let b = other.clone();
        let support = match (self.support, other.support) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        };
        SpectralFunction {
            label: format!("({})*({})", self.label, other.label),
            n: self.n,
            gauss: self.gauss + other.gauss,
            cofactor: Cofactor::Analytic(Arc::new(move |xi| a.cofactor(xi) * b.cofactor(xi))),
            support,
            radial: self.radial && other.radial,
        }
    }

    pub(crate) fn quotient_unchecked(&self, other: &SpectralFunction) -> SpectralFunction {
        let a = self.clone();
        let b = other.clone();
        SpectralFunction {
            label: format!("({})/({})", self.label, other.label),
            n: self.n,
            gauss: self.gauss - other.gauss,
            cofactor: Cofactor::Analytic(Arc::new(move |xi| {
                let num = a.cofactor(xi);
                if num == C64::new(0.0, 0.0) {
                    num
                } else {
                    num / b.cofactor(xi)
                }
            })),
            support: self.support,
            radial: self.radial && other.radial,
        }
    }

    /// Pointwise values by the continuous inverse transform over the support.
    pub fn evaluator(&self, rule: &PolarRule) -> Result<SpatialEvaluator> {
        if self.n != 1 {
            return Err(Error::InvalidArgument("polar evaluation needs n = 1".into()));
        }
        let Some(r) = self.support else {
            return Err(Error::UnsupportedSpectrum);
        };
        let nodes = rule.nodes(r);
        let weighted = nodes
            .iter()
            .map(|(xi, w)| (xi.clone(), self.value(xi) * *w))
            .filter(|(_, v)| *v != C64::new(0.0, 0.0))
            .collect();
        Ok(SpatialEvaluator { terms: Arc::new(weighted) })
    }

    /// Spatial function as a [`Symbol`] (continuous inverse transform).
    pub fn to_symbol(&self, rule: &PolarRule) -> Result<Symbol> {
        let eval = self.evaluator(rule)?;
        Ok(Symbol::from_fn(self.label.clone(), SymbolKind::GridSampled, self.n, move |z| {
            eval.eval(z)
        })
        .with_radial(self.radial)
        .with_integral(Some(self.value(&[0.0, 0.0]))))
    }
}

fn lattice_lookup(grid: &SpectralGrid, values: &[C64], xi: &[f64]) -> C64 {
    let m = grid.points;
    let step = grid.freq_step();
    let mut flat = 0usize;
    for &x in xi {
        let pos = x / step + (m / 2) as f64;
        let k = pos.round();
        if (pos - k).abs() > 1e-6 {
            return C64::new(f64::NAN, f64::NAN);
        }
        if k < 0.0 || k >= m as f64 {
            return C64::new(0.0, 0.0);
        }
        flat = flat * m + k as usize;
    }
    values[flat]
}

/// Polar product rule on the disc `|ξ| ≤ r` in `ℝ²`: two Gauss–Legendre radial
/// panels split at `r/2` times a uniform angular rule.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarRule {
    pub radial: usize,
    pub angular: usize,
}

impl Default for PolarRule {
    fn default() -> Self {
        PolarRule {
            radial: 64,
            angular: 256,
        }
    }
}

impl PolarRule {
    /// Nodes `ξ` and weights for `∫_{|ξ|≤r} g(ξ) dξ`.
    pub fn nodes(&self, r: f64) -> Vec<(Vec<f64>, f64)> {
        let gl = gauss_legendre(self.radial);
        let dtheta = 2.0 * PI / self.angular as f64;
        let mut out = Vec::with_capacity(2 * self.radial * self.angular);
        for (lo, hi) in [(0.0, r / 2.0), (r / 2.0, r)] {
            let half = (hi - lo) / 2.0;
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                let rho = lo + half * (x + 1.0);
                let wr = w * half * rho * dtheta;
                for a in 0..self.angular {
                    let th = a as f64 * dtheta;
                    out.push((vec![rho * th.cos(), rho * th.sin()], wr));
                }
            }
        }
        out
    }
}

/// `z ↦ Σ_m w_m f̂(ξ_m) e^{2πi Re⟨z, ξ_m⟩}`.
#[derive(Clone)]
pub struct SpatialEvaluator {
    terms: Arc<Vec<(Vec<f64>, C64)>>,
}

impl SpatialEvaluator {
    pub fn eval(&self, z: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(xi, v)| {
                let phase = z[0].re * xi[0] + z[0].im * xi[1];
                v * C64::from_polar(1.0, 2.0 * PI * phase)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_exponents_add_and_cancel() {
        let phi = SpectralFunction::phi(1);
        let sq = phi.product(&phi);
        assert_eq!(sq.gauss(), 2.0);
        let back = sq.quotient_unchecked(&phi);
        assert_eq!(back.gauss(), 1.0);
        let xi = [3.0, 4.0];
        assert!((back.log10_abs(&xi) - phi.log10_abs(&xi)).abs() < 1e-12);
        // |ξ| = 5: e^{-25π} is representable, e^{-π·400} is not, yet its log is.
        assert!((phi.log10_abs(&[12.0, 16.0]) + PI * 400.0 / LN_10).abs() < 1e-9);
    }

    #[test]
    fn sampled_lookup_matches_fft() {
        let grid = SpectralGrid::new(1, 6.0, 64).unwrap();
        let f = GridFunction::sample(&grid, |z| C64::new((-PI * z[0].norm_sqr()).exp(), 0.0));
        let s = SpectralFunction::from_samples(&f).unwrap();
        let xi = [grid.freq(40), grid.freq(30)];
        let expect = (-PI * norm_sqr_real(&xi)).exp();
        assert!((s.value(&xi).re - expect).abs() < 1e-10);
        assert!(s.value(&[0.01, 0.0]).re.is_nan());
    }

    #[test]
    fn polar_inverse_of_gaussian() {
        // Spectrum e^{-π|ξ|²} truncated at |ξ| = 6 is φ up to e^{-36π}.
        let g = SpectralFunction::analytic("phi-cut", 1, 1.0, Some(6.0), true, |_| C64::new(1.0, 0.0));
        let ev = g.evaluator(&PolarRule::default()).unwrap();
        for z in [C64::new(0.0, 0.0), C64::new(0.5, -0.3), C64::new(1.2, 0.4)] {
            let expect = (-PI * z.norm_sqr()).exp();
            assert!((ev.eval(&[z]) - C64::new(expect, 0.0)).norm() < 1e-12);
        }
    }
}
