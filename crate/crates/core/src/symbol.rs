//! Evaluable symbols on `ℂⁿ` with the metadata the assemblers rely on.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fock::{norm_sqr, pairing};
use crate::linalg::C64;

pub type Evaluator = Arc<dyn Fn(&[C64]) -> C64 + Send + Sync>;

/// Closed-form family a symbol belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    Constant,
    Gaussian,
    Polynomial,
    PlaneWave,
    RadialProfile,
    GridSampled,
    Composite,
}

/// `amplitude · e^{-π s |z - center|²}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianParams {
    pub amplitude: C64,
    pub s: f64,
    pub center: Vec<C64>,
}

impl GaussianParams {
    /// `∫ amplitude e^{-π s|z|²} dz = amplitude / sⁿ`.
    pub fn integral(&self) -> C64 {
        self.amplitude / self.s.powi(self.center.len() as i32)
    }
}

/// A function `ℂⁿ → ℂ` with radiality and boundedness metadata.
#[derive(Clone)]
pub struct Symbol {
    label: String,
    kind: SymbolKind,
    n: usize,
    evaluator: Evaluator,
    is_radial: bool,
    sup_bound: Option<f64>,
    gaussian: Option<GaussianParams>,
    integral: Option<C64>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("label", &self.label)
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("is_radial", &self.is_radial)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl Symbol {
    pub fn from_fn<F>(label: impl Into<String>, kind: SymbolKind, n: usize, f: F) -> Self
    where
        F: Fn(&[C64]) -> C64 + Send + Sync + 'static,
    {
        Symbol {
            label: label.into(),
            kind,
            n,
            evaluator: Arc::new(f),
            is_radial: false,
            sup_bound: None,
            gaussian: None,
            integral: None,
        }
    }

    pub fn with_radial(mut self, radial: bool) -> Self {
        self.is_radial = radial;
        self
    }

    pub fn with_sup_bound(mut self, bound: Option<f64>) -> Self {
        self.sup_bound = bound;
        self
    }

    pub fn with_integral(mut self, integral: Option<C64>) -> Self {
        self.integral = integral;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn eval(&self, z: &[C64]) -> C64 {
        (self.evaluator)(z)
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_radial(&self) -> bool {
        self.is_radial
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    pub fn gaussian(&self) -> Option<&GaussianParams> {
        self.gaussian.as_ref()
    }

    /// Known value of `∫ a dz`, if any.
    pub fn integral(&self) -> Option<C64> {
        self.integral
    }

    pub fn constant(n: usize, value: C64) -> Self {
        Symbol::from_fn(format!("constant({value})"), SymbolKind::Constant, n, move |_| value)
            .with_radial(true)
            .with_sup_bound(Some(value.norm()))
    }

    /// `amplitude · e^{-π s |z - center|²}`.
    pub fn gaussian_general(amplitude: C64, s: f64, center: Vec<C64>) -> Self {
        let n = center.len();
        let params = GaussianParams {
            amplitude,
            s,
            center: center.clone(),
        };
        let radial = center.iter().all(|c| c.norm() == 0.0);
        let c2 = center.clone();
        let mut sym = Symbol::from_fn(
            format!("gaussian(s={s}, center={center:?})"),
            SymbolKind::Gaussian,
            n,
            move |z| {
                let d: f64 = z.iter().zip(&c2).map(|(a, b)| (a - b).norm_sqr()).sum();
                amplitude * (-PI * s * d).exp()
            },
        )
        .with_radial(radial)
        .with_sup_bound(Some(amplitude.norm()))
        .with_integral(Some(params.integral()));
        sym.gaussian = Some(params);
        sym
    }

    /// `φ(z) = e^{-π|z|²}`.
    pub fn phi(n: usize) -> Self {
        Symbol::gaussian_general(C64::new(1.0, 0.0), 1.0, vec![C64::new(0.0, 0.0); n]).with_label("phi")
    }

    /// Unit-mass Gaussian `t^{-2n} e^{-π|z|²/t²}`.
    pub fn dilated_gaussian(n: usize, t: f64) -> Self {
        let amp = t.powi(-2 * n as i32);
        Symbol::gaussian_general(C64::new(amp, 0.0), 1.0 / (t * t), vec![C64::new(0.0, 0.0); n])
            .with_label(format!("dilated-gaussian(t={t})"))
    }

    /// `e^{2πi Re⟨w₀, z⟩}`.
    pub fn plane_wave(w0: Vec<C64>) -> Self {
        let n = w0.len();
        let w = w0.clone();
        Symbol::from_fn(format!("plane-wave({w0:?})"), SymbolKind::PlaneWave, n, move |z| {
            C64::from_polar(1.0, 2.0 * PI * pairing(&w, z).re)
        })
        .with_sup_bound(Some(1.0))
    }

    /// `z ↦ f(|z|²)`.
    pub fn radial_profile<F>(label: impl Into<String>, n: usize, sup: Option<f64>, f: F) -> Self
    where
        F: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        Symbol::from_fn(label, SymbolKind::RadialProfile, n, move |z| f(norm_sqr(z)))
            .with_radial(true)
            .with_sup_bound(sup)
    }

    /// `|z|²` (unbounded).
    pub fn modulus_squared(n: usize) -> Self {
        Symbol::from_fn("modulus-squared", SymbolKind::Polynomial, n, |z| {
            C64::new(norm_sqr(z), 0.0)
        })
        .with_radial(true)
    }

    /// `2 Re z_j` (unbounded).
    pub fn twice_real_part(n: usize, j: usize) -> Self {
        Symbol::from_fn(format!("2re(z{j})"), SymbolKind::Polynomial, n, move |z| {
            C64::new(2.0 * z[j].re, 0.0)
        })
    }

    /// `Σ c z^α conj(z)^β` (unbounded unless constant).
    pub fn polynomial(n: usize, terms: Vec<(C64, Vec<usize>, Vec<usize>)>) -> Self {
        Symbol::from_fn("polynomial", SymbolKind::Polynomial, n, move |z| {
            terms
                .iter()
                .map(|(c, a, b)| {
                    let mut acc = *c;
                    for j in 0..z.len() {
                        acc *= z[j].powu(a[j] as u32) * z[j].conj().powu(b[j] as u32);
                    }
                    acc
                })
                .sum()
        })
    }

    /// `τ_{z₀} a (w) = a(w - z₀)`.
    pub fn translated(&self, z0: &[C64]) -> Symbol {
        let inner = self.evaluator.clone();
        let z0_meta = z0.to_vec();
        let z0 = z0.to_vec();
        let mut s = Symbol::from_fn(
            format!("translate({}, {z0:?})", self.label),
            SymbolKind::Composite,
            self.n,
            move |w| {
                let shifted: Vec<C64> = w.iter().zip(&z0).map(|(a, b)| a - b).collect();
                inner(&shifted)
            },
        )
        .with_sup_bound(self.sup_bound)
        .with_integral(self.integral);
        s.gaussian = self.gaussian.as_ref().map(|g| GaussianParams {
            amplitude: g.amplitude,
            s: g.s,
            center: g.center.iter().zip(&z0_meta).map(|(a, b)| a + b).collect(),
        });
        s
    }

    /// Pointwise product.
    pub fn product(&self, other: &Symbol) -> Symbol {
        let a = self.evaluator.clone();
        let b = other.evaluator.clone();
        Symbol::from_fn(
            format!("({})*({})", self.label, other.label),
            SymbolKind::Composite,
            self.n,
            move |z| a(z) * b(z),
        )
        .with_radial(self.is_radial && other.is_radial)
        .with_sup_bound(match (self.sup_bound, other.sup_bound) {
            (Some(x), Some(y)) => Some(x * y),
            _ => None,
        })
    }

    /// `λ a`.
    pub fn scaled(&self, lambda: C64) -> Symbol {
        let a = self.evaluator.clone();
        let mut s = Symbol::from_fn(
            format!("{lambda}*({})", self.label),
            self.kind,
            self.n,
            move |z| a(z) * lambda,
        )
        .with_radial(self.is_radial)
        .with_sup_bound(self.sup_bound.map(|b| b * lambda.norm()))
        .with_integral(self.integral.map(|v| v * lambda));
        s.gaussian = self.gaussian.as_ref().map(|g| GaussianParams {
            amplitude: g.amplitude * lambda,
            s: g.s,
            center: g.center.clone(),
        });
        s
    }

    /// `a - b`.
    pub fn difference(&self, other: &Symbol) -> Symbol {
        let a = self.evaluator.clone();
        let b = other.evaluator.clone();
        Symbol::from_fn(
            format!("({})-({})", self.label, other.label),
            SymbolKind::Composite,
            self.n,
            move |z| a(z) - b(z),
        )
        .with_radial(self.is_radial && other.is_radial)
        .with_sup_bound(match (self.sup_bound, other.sup_bound) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        })
        .with_integral(match (self.integral, other.integral) {
            (Some(x), Some(y)) => Some(x - y),
            _ => None,
        })
    }
}

/// Smooth bounded symbols used across the suites, for `ℂⁿ`.
pub fn registry(n: usize) -> Vec<Symbol> {
    let zero = vec![C64::new(0.0, 0.0); n];
    let mut center = zero.clone();
    center[0] = C64::new(0.4, -0.3);
    let mut w0 = zero.clone();
    w0[0] = C64::new(0.5, 0.3);
    vec![
        Symbol::phi(n),
        Symbol::gaussian_general(C64::new(1.0, 0.0), 0.5, center).with_label("gaussian-shifted"),
        Symbol::plane_wave(w0).with_label("plane-wave"),
        Symbol::radial_profile("lorentzian", n, Some(1.0), |r2| {
            C64::new(1.0 / (1.0 + PI * r2), 0.0)
        }),
        Symbol::from_fn("modulated", SymbolKind::Composite, n, |z| {
            C64::new((PI * z[0].re).cos() * (-0.25 * norm_sqr(z)).exp(), 0.0)
        })
        .with_sup_bound(Some(1.0)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn gaussian_integral_metadata() {
        let g = Symbol::dilated_gaussian(1, 0.5);
        assert!((g.integral().unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(g.is_radial());
        assert!((g.eval(&[c(0.0, 0.0)]).re - 4.0).abs() < 1e-15);
    }

    #[test]
    fn plane_wave_is_unimodular() {
        let p = Symbol::plane_wave(vec![c(0.5, 0.3)]);
        let v = p.eval(&[c(1.3, -0.2)]);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        let phase = 2.0 * PI * (c(1.3, -0.2).conj() * c(0.5, 0.3)).re;
        assert!((v - C64::from_polar(1.0, phase)).norm() < 1e-14);
    }

    #[test]
    fn translation_moves_argument() {
        let a = Symbol::twice_real_part(1, 0);
        let t = a.translated(&[c(0.25, 0.0)]);
        assert!((t.eval(&[c(1.0, 2.0)]) - c(1.5, 0.0)).norm() < 1e-15);
    }
}
