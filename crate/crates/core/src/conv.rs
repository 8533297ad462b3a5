//! Convolutions between functions and operators.
//!
//! Operator translation is `α_z S = W_z S W_z^†` and
//! `ψ ∗ S = ∫ ψ(z) α_z S dz`. All translation integrals run through a
//! [`ConvQuadrature`].

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{norm_sqr, TruncatedSpace};
use crate::linalg::{CMatrix, C64};
use crate::operators::{parity, weyl_unscaled, OperatorMatrix};
use crate::quadrature::gauss_hermite;
use crate::symbol::{Symbol, SymbolKind};
use crate::wiener::{GridFunction, SpectralFunction, SpectralGrid};

/// Tail above which a translation sum attaches a warning.
pub const TAIL_WARNING: f64 = 1e-6;

/// Relative density on the box boundary above which a uniform rule is rejected.
pub const LEAKAGE_LIMIT: f64 = 1e-10;

const CHUNK: usize = 64;

/// How the nodes of a [`ConvQuadrature`] were laid out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum ConvRuleKind {
    /// Trapezoid on `[-R, R]^{2n}` with `points` nodes per axis.
    Uniform { radius: f64, points: usize },
    /// Product Gauss–Hermite for the weight `e^{-π p|z - c|²}`.
    GaussHermite { precision: f64, order: usize },
    /// Caller-supplied nodes.
    Points,
}

/// Nodes and Lebesgue weights for `∫_{ℂⁿ} g(z) dz`.
#[derive(Clone, Debug)]
pub struct ConvQuadrature {
    n: usize,
    nodes: Vec<Vec<C64>>,
    weights: Vec<f64>,
    kind: ConvRuleKind,
}

fn product_rule(n: usize, axis: &[(f64, f64)], shift: &[C64]) -> (Vec<Vec<C64>>, Vec<f64>) {
    let m = axis.len();
    let dims = 2 * n;
    let total = m.pow(dims as u32);
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; dims];
    for _ in 0..total {
        let mut w = 1.0;
        let mut z = Vec::with_capacity(n);
        for j in 0..n {
            let (x, wx) = axis[idx[2 * j]];
            let (y, wy) = axis[idx[2 * j + 1]];
            w *= wx * wy;
            z.push(C64::new(x, y) + shift[j]);
        }
        nodes.push(z);
        weights.push(w);
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    (nodes, weights)
}

impl ConvQuadrature {
    /// Trapezoid rule on `[-R, R]^{2n}`, endpoints included.
    pub fn uniform(n: usize, radius: f64, points: usize) -> Result<Self> {
        if points < 2 || !(radius > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "uniform rule needs R > 0 and at least 2 points (got R = {radius}, {points})"
            )));
        }
        let h = 2.0 * radius / (points - 1) as f64;
        let axis: Vec<(f64, f64)> = (0..points)
            .map(|k| {
                let w = if k == 0 || k == points - 1 { h / 2.0 } else { h };
                (-radius + k as f64 * h, w)
            })
            .collect();
        let (nodes, weights) = product_rule(n, &axis, &vec![C64::new(0.0, 0.0); n]);
        Ok(ConvQuadrature {
            n,
            nodes,
            weights,
            kind: ConvRuleKind::Uniform { radius, points },
        })
    }

    /// Gauss–Hermite rule exact for polynomials times `e^{-π p|z - c|²}`.
    pub fn gauss_hermite(n: usize, precision: f64, center: &[C64], order: usize) -> Self {
        let gh = gauss_hermite(order);
        let scale = 1.0 / (PI * precision).sqrt();
        let axis: Vec<(f64, f64)> = gh
            .nodes
            .iter()
            .zip(&gh.weights)
            .map(|(t, w)| (t * scale, w * (t * t).exp() * scale))
            .collect();
        let (nodes, weights) = product_rule(n, &axis, center);
        ConvQuadrature {
            n,
            nodes,
            weights,
            kind: ConvRuleKind::GaussHermite { precision, order },
        }
    }

    pub fn from_points(n: usize, nodes: Vec<Vec<C64>>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                actual: weights.len(),
            });
        }
        if let Some(bad) = nodes.iter().find(|z| z.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        Ok(ConvQuadrature {
            n,
            nodes,
            weights,
            kind: ConvRuleKind::Points,
        })
    }

    /// Nodes of a spectral grid with weight `h^{2n}` each.
    pub fn from_grid(grid: &SpectralGrid) -> Self {
        let w = grid.step().powi(grid.real_dim() as i32);
        ConvQuadrature {
            n: grid.n,
            nodes: grid.nodes().collect(),
            weights: vec![w; grid.len()],
            kind: ConvRuleKind::Points,
        }
    }

    /// Default rule for `∫ a(z) α_z S dz` at truncation degree `degree`.
    ///
    /// The integrand carries `e^{-π|z|²}` from the two Weyl factors, so a
    /// Gaussian `a = e^{-π s|z - c|²}` gives precision `1 + s` about
    /// `s c/(1 + s)`.
    pub fn for_translation(a: &Symbol, degree: usize) -> Self {
        let n = a.n();
        if let Some(g) = a.gaussian() {
            let p = 1.0 + g.s;
            let center: Vec<C64> = g.center.iter().map(|c| c * (g.s / p)).collect();
            return ConvQuadrature::gauss_hermite(n, p, &center, degree + 4);
        }
        if n == 1 {
            let radius = 3.0 + degree as f64 / 8.0;
            let points = (2.0 * radius / 0.125).round() as usize + 1;
            return ConvQuadrature::uniform(1, radius, points).expect("positive radius");
        }
        ConvQuadrature::gauss_hermite(n, 1.0, &vec![C64::new(0.0, 0.0); n], degree + 6)
    }

    /// Default rule for `∫ a(z - w) ψ(w) dw`.
    pub fn for_function(psi: &Symbol) -> Self {
        let n = psi.n();
        if let Some(g) = psi.gaussian() {
            let order = if n == 1 { 32 } else { 12 };
            return ConvQuadrature::gauss_hermite(n, g.s, &g.center, order);
        }
        ConvQuadrature::uniform(n, 3.0, 25).expect("positive radius")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec<C64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> &ConvRuleKind {
        &self.kind
    }

    pub fn integrate<F: Fn(&[C64]) -> C64>(&self, f: F) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| f(z) * *w).sum()
    }

    /// `max |ψ|` over boundary nodes relative to `max |ψ|` (uniform rules only).
    pub fn leakage(&self, psi: &Symbol) -> Option<f64> {
        let ConvRuleKind::Uniform { radius, .. } = self.kind else {
            return None;
        };
        let edge = |z: &[C64]| {
            z.iter()
                .any(|v| (v.re.abs() - radius).abs() < 1e-12 || (v.im.abs() - radius).abs() < 1e-12)
        };
        let mut top = 0.0_f64;
        let mut rim = 0.0_f64;
        for z in &self.nodes {
            let v = psi.eval(z).norm();
            top = top.max(v);
            if edge(z) {
                rim = rim.max(v);
            }
        }
        Some(if top == 0.0 { 0.0 } else { rim / top })
    }

    fn check_leakage(&self, psi: &Symbol) -> Result<()> {
        if let (Some(l), ConvRuleKind::Uniform { radius, .. }) = (self.leakage(psi), &self.kind) {
            if l > LEAKAGE_LIMIT {
                return Err(Error::BoxTooSmall {
                    radius: *radius,
                    leakage: l,
                });
            }
        }
        Ok(())
    }
}

/// `Σ_i c_i W_{z_i} S W_{z_i}^†` on the truncated space, and the largest Weyl
/// tail over nodes with non-negligible coefficient.
pub(crate) fn translation_sum(
    space: &Arc<TruncatedSpace>,
    s: &CMatrix,
    nodes: &[Vec<C64>],
    coeffs: &[C64],
) -> (CMatrix, f64) {
    let d = space.dim();
    // Columns beyond the support of S never contribute.
    let support = (0..d)
        .rev()
        .find(|&i| (0..d).any(|j| s[(i, j)] != C64::new(0.0, 0.0) || s[(j, i)] != C64::new(0.0, 0.0)))
        .map_or(0, |i| i + 1);
    let s_sub = s.view((0, 0), (support, support)).into_owned();
    let scale: f64 = coeffs.iter().map(|c| c.norm()).sum();
    let work: Vec<(usize, usize)> = (0..nodes.len())
        .step_by(CHUNK)
        .map(|a| (a, (a + CHUNK).min(nodes.len())))
        .collect();
    let parts: Vec<(CMatrix, f64)> = work
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = CMatrix::zeros(d, d);
            let mut tail = 0.0_f64;
            for i in lo..hi {
                let c = coeffs[i];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let z = &nodes[i];
                let g = (-PI * norm_sqr(z) / 2.0).exp();
                let w = weyl_unscaled(space, z).columns(0, support) * C64::new(g, 0.0);
                if c.norm() > 1e-10 * scale {
                    for k in 0..support {
                        tail = tail.max(1.0 - w.column(k).norm_squared());
                    }
                }
                let ws = &w * &s_sub;
                acc += (ws * w.adjoint()) * c;
            }
            (acc, tail)
        })
        .collect();
    let mut out = CMatrix::zeros(d, d);
    let mut tail = 0.0_f64;
    for (m, t) in parts {
        out += m;
        tail = tail.max(t);
    }
    (out, tail)
}

fn sum_to_operator(
    s: &OperatorMatrix,
    a: &Symbol,
    quad: &ConvQuadrature,
    what: &str,
) -> Result<OperatorMatrix> {
    let space = s.space();
    space.require_fock("operator convolution")?;
    if a.n() != space.n() || quad.n() != space.n() {
        return Err(Error::DimensionMismatch {
            expected: space.n(),
            actual: if a.n() != space.n() { a.n() } else { quad.n() },
        });
    }
    let coeffs: Vec<C64> = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .map(|(z, w)| a.eval(z) * *w)
        .collect();
    if let Some(bad) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFiniteSymbol {
            label: a.label().to_string(),
            point: format!("{:?}", quad.nodes()[bad]),
        });
    }
    let (m, tail) = translation_sum(space, s.entries(), quad.nodes(), &coeffs);
    let mut op = OperatorMatrix::from_parts(space.clone(), m);
    if tail > TAIL_WARNING {
        op.push_warning(format!("{what}: weyl truncation tail {tail:.3e} on the support of S"));
    }
    Ok(op)
}

/// `ψ ∗ S` with the default translation rule.
pub fn conv_fo(psi: &Symbol, s: &OperatorMatrix) -> Result<OperatorMatrix> {
    let quad = ConvQuadrature::for_translation(psi, s.space().degree());
    conv_fo_with(psi, s, &quad)
}

pub fn conv_fo_with(psi: &Symbol, s: &OperatorMatrix, quad: &ConvQuadrature) -> Result<OperatorMatrix> {
    sum_to_operator(s, psi, quad, "conv_fo")
}

/// `a ∗ S = ∫ a(z) α_z S dz` for a bounded symbol and a low-degree `S`.
pub fn conv_symbol_op(a: &Symbol, s: &OperatorMatrix) -> Result<OperatorMatrix> {
    let quad = ConvQuadrature::for_translation(a, s.space().degree());
    conv_symbol_op_with(a, s, &quad)
}

pub fn conv_symbol_op_with(a: &Symbol, s: &OperatorMatrix, quad: &ConvQuadrature) -> Result<OperatorMatrix> {
    sum_to_operator(s, a, quad, "conv_symbol_op")
}

/// `ψ ∗ a` as a lazily evaluated symbol.
pub fn conv_ff(psi: &Symbol, a: &Symbol) -> Result<Symbol> {
    conv_ff_with(psi, a, &ConvQuadrature::for_function(psi))
}

pub fn conv_ff_with(psi: &Symbol, a: &Symbol, quad: &ConvQuadrature) -> Result<Symbol> {
    if psi.n() != a.n() || quad.n() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            actual: psi.n(),
        });
    }
    quad.check_leakage(psi)?;
    let terms: Vec<(Vec<C64>, C64)> = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .map(|(w, wt)| (w.clone(), psi.eval(w) * *wt))
        .filter(|(_, c)| *c != C64::new(0.0, 0.0))
        .collect();
    let l1: f64 = terms.iter().map(|(_, c)| c.norm()).sum();
    let terms = Arc::new(terms);
    let inner = a.evaluator().clone();
    let n = a.n();
    let sym = Symbol::from_fn(
        format!("({})∗({})", psi.label(), a.label()),
        SymbolKind::GridSampled,
        n,
        move |z| {
            let mut shifted = vec![C64::new(0.0, 0.0); n];
            terms
                .iter()
                .map(|(w, c)| {
                    for j in 0..n {
                        shifted[j] = z[j] - w[j];
                    }
                    inner(&shifted) * c
                })
                .sum()
        },
    )
    .with_radial(psi.is_radial() && a.is_radial())
    .with_sup_bound(a.sup_bound().map(|b| b * l1))
    .with_integral(match (psi.integral(), a.integral()) {
        (Some(x), Some(y)) => Some(x * y),
        _ => None,
    });
    Ok(sym)
}

/// `z ↦ tr(T α_z(U S U))`.
#[derive(Clone, Debug)]
pub struct OperatorConvolution {
    t: OperatorMatrix,
    uss: CMatrix,
}

impl OperatorConvolution {
    pub fn eval(&self, z: &[C64]) -> C64 {
        let space = self.t.space();
        let g = (-PI * norm_sqr(z) / 2.0).exp();
        let w = weyl_unscaled(space, z) * C64::new(g, 0.0);
        let moved = &w * &self.uss * w.adjoint();
        (self.t.entries() * moved).trace()
    }

    pub fn to_symbol(&self) -> Symbol {
        let me = self.clone();
        Symbol::from_fn("operator-convolution", SymbolKind::Composite, self.t.space().n(), move |z| me.eval(z))
    }
}

/// `T ∗ S`.
pub fn conv_oo(t: &OperatorMatrix, s: &OperatorMatrix) -> Result<OperatorConvolution> {
    let space = t.space();
    space.require_fock("conv_oo")?;
    if s.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            actual: s.dim(),
        });
    }
    let u = parity(space);
    let uss = u.entries() * s.entries() * u.entries();
    Ok(OperatorConvolution { t: t.clone(), uss })
}

/// Outcome of the regularity test `ψ̂ ≠ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub regular: bool,
    /// `min |ψ̂|` over the frequency lattice (may underflow to 0).
    pub min_abs: f64,
    pub log10_min_abs: f64,
    /// Minimum of the non-Gaussian cofactor, the quantity held to the threshold.
    pub min_cofactor: f64,
    pub location: Vec<f64>,
    pub threshold: f64,
}

/// Checks `|ψ̂| > threshold` on the grid's frequency lattice.
///
/// An exact Gaussian factor `e^{-πγ|ξ|²}` never vanishes; the threshold is
/// applied to the remaining cofactor and the full minimum is reported in log form.
pub fn is_regular_function(psi: &SpectralFunction, grid: &SpectralGrid, threshold: f64) -> RegularityReport {
    let mut min_cof = f64::INFINITY;
    let mut min_log = f64::INFINITY;
    let mut location = vec![0.0; grid.real_dim()];
    for xi in grid.frequencies() {
        let cof = psi.cofactor(&xi).norm();
        let lg = psi.log10_abs(&xi);
        min_cof = min_cof.min(cof);
        if lg < min_log {
            min_log = lg;
            location = xi;
        }
    }
    RegularityReport {
        regular: min_cof > threshold,
        min_abs: 10f64.powf(min_log),
        log10_min_abs: min_log,
        min_cofactor: min_cof,
        location,
        threshold,
    }
}

/// Spectrum of a symbol: closed form for Gaussians, FFT of samples otherwise.
pub fn symbol_spectrum(a: &Symbol, grid: &SpectralGrid) -> Result<SpectralFunction> {
    if let Some(g) = a.gaussian() {
        let n = a.n();
        let coef = g.amplitude / g.s.powi(n as i32);
        let center = g.center.clone();
        let radial = center.iter().all(|c| c.norm() == 0.0);
        return Ok(SpectralFunction::analytic(a.label(), n, 1.0 / g.s, None, radial, move |xi| {
            coef * crate::wiener::character(&center, xi)
        }));
    }
    let samples = GridFunction::sample(grid, |z| a.eval(z));
    Ok(SpectralFunction::from_samples(&samples)?
        .with_label(a.label())
        .with_radial(a.is_radial()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs};
    use crate::operators::{berezin, phi_op, toeplitz};

    fn fock(deg: usize) -> Arc<TruncatedSpace> {
        TruncatedSpace::fock(1, deg).unwrap()
    }

    fn lead_err(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
        max_abs(&(a.leading() - b.leading()))
    }

    #[test]
    fn quadrature_integrates_registry_gaussians() {
        let trap = ConvQuadrature::uniform(1, 5.0, 81).unwrap();
        for g in [Symbol::phi(1), crate::symbol::registry(1)[1].clone(), Symbol::dilated_gaussian(1, 0.25)] {
            let exact = g.integral().unwrap();
            let gh = ConvQuadrature::for_function(&g);
            assert!((gh.integrate(|z| g.eval(z)) - exact).norm() < 1e-8);
            if g.gaussian().unwrap().s <= 2.0 {
                assert!((trap.integrate(|z| g.eval(z)) - exact).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn gaussian_self_convolution() {
        let phi = Symbol::phi(1);
        let pp = conv_ff(&phi, &phi).unwrap();
        for z in [c(0.0, 0.0), c(1.0, -0.5), c(-1.4, 1.4)] {
            let expect = 0.5 * (-PI * z.norm_sqr() / 2.0).exp();
            assert!((pp.eval(&[z]) - c(expect, 0.0)).norm() < 1e-8);
        }
        let one = conv_ff(&phi, &Symbol::constant(1, c(1.0, 0.0))).unwrap();
        assert!((one.eval(&[c(0.3, 0.1)]) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phi_convolution_is_berezin_of_plane_wave() {
        let s = fock(24);
        let a = Symbol::plane_wave(vec![c(0.6, -0.5)]);
        let lhs = conv_ff(&Symbol::phi(1), &a).unwrap();
        let b = berezin(&s, &toeplitz(&s, &a).unwrap()).unwrap();
        for z in [c(0.0, 0.0), c(0.5, 0.2), c(-0.8, 0.9)] {
            assert!((lhs.eval(&[z]) - b.eval(&[z])).norm() < 1e-6);
        }
    }

    #[test]
    fn leaky_box_is_rejected() {
        let slow = Symbol::radial_profile("slow", 1, Some(1.0), |r2| c(1.0 / (1.0 + r2), 0.0));
        assert!(matches!(
            conv_ff(&slow, &Symbol::phi(1)),
            Err(Error::BoxTooSmall { .. })
        ));
    }

    #[test]
    fn conv_fo_examples() {
        // I is not finite rank: the N = 16 leading block needs a guard degree.
        let guarded = fock(40);
        let phi = Symbol::phi(1);
        let id = OperatorMatrix::identity(&guarded);
        let pi = conv_fo(&phi, &id).unwrap();
        assert!(max_abs(&(pi.block(9) - id.block(9))) < 1e-6);
        let s = fock(16);
        let big = phi_op(&s).unwrap();
        let pf = conv_fo(&phi, &big).unwrap();
        let t = toeplitz(&s, &phi).unwrap();
        assert!(lead_err(&pf, &t) < 1e-6);
    }

    #[test]
    fn toeplitz_is_symbol_convolution_with_phi() {
        let s = fock(16);
        let big = phi_op(&s).unwrap();
        for a in crate::symbol::registry(1) {
            let lhs = conv_symbol_op(&a, &big).unwrap();
            let rhs = toeplitz(&s, &a).unwrap();
            let err = max_abs(&(lhs.block(8) - rhs.block(8)));
            assert!(err < 1e-6, "{}: {err:e}", a.label());
        }
        let one = conv_symbol_op(&Symbol::constant(1, c(1.0, 0.0)), &big).unwrap();
        assert!(lead_err(&one, &OperatorMatrix::identity(&s)) < 1e-8);
    }

    #[test]
    fn operator_convolution_identities() {
        let s = fock(16);
        let big = phi_op(&s).unwrap();
        let pp = conv_oo(&big, &big).unwrap();
        let mut sm = CMatrix::zeros(17, 17);
        sm[(0, 1)] = c(0.3, 0.2);
        sm[(2, 2)] = c(1.0, 0.0);
        sm[(3, 0)] = c(-0.5, 0.1);
        let x = OperatorMatrix::new(s.clone(), sm).unwrap();
        let b = berezin(&s, &x).unwrap();
        let px = conv_oo(&big, &x).unwrap();
        let xp = conv_oo(&x, &big).unwrap();
        for z in [c(0.0, 0.0), c(0.7, -0.4), c(1.0, 1.0)] {
            let expect = (-PI * z.norm_sqr()).exp();
            assert!((pp.eval(&[z]) - c(expect, 0.0)).norm() < 1e-12);
            assert!((px.eval(&[z]) - b.eval(&[z])).norm() < 1e-12);
            assert!((px.eval(&[z]) - xp.eval(&[z])).norm() < 1e-12);
        }
    }

    #[test]
    fn regularity() {
        let grid = SpectralGrid::new(1, 6.0, 64).unwrap();
        let phi = Symbol::phi(1);
        let r = is_regular_function(&symbol_spectrum(&phi, &grid).unwrap(), &grid, 1e-12);
        assert!(r.regular);
        let corner = grid.freq(0);
        assert!((r.log10_min_abs + PI * 2.0 * corner * corner / std::f64::consts::LN_10).abs() < 1e-9);
        let zero = phi.difference(&phi);
        assert!(!is_regular_function(&symbol_spectrum(&zero, &grid).unwrap(), &grid, 1e-12).regular);
        let sp = symbol_spectrum(&phi, &grid).unwrap();
        assert!(is_regular_function(&sp.product(&sp), &grid, 1e-12).regular);
        let f = crate::wiener::approx_identity(1, 1.0, &grid).unwrap().spectrum();
        assert!(!is_regular_function(&f, &grid, 1e-12).regular);
    }
}
