//! Operators on a truncated space: Toeplitz, Weyl, parity, the vacuum
//! projector `Φ`, and the Berezin transform.
//!
//! Matrix entries are `(j, k) = ⟨S e_k, e_j⟩`. Every operator stored here is
//! the compression `P S P` to the truncated span.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{kernel_coeffs_unchecked, norm_sqr, weighted_gram, TruncatedSpace};
use crate::linalg::{self, CMatrix, C64};
use crate::quadrature::gauss_hermite;
use crate::symbol::Symbol;

/// Dense matrix of an operator on a truncated space.
#[derive(Clone)]
pub struct OperatorMatrix {
    space: Arc<TruncatedSpace>,
    entries: CMatrix,
    warnings: Vec<String>,
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorMatrix")
            .field("dim", &self.dim())
            .field("entries", &self.entries)
            .field("warnings", &self.warnings)
            .finish()
    }
}

impl OperatorMatrix {
    pub fn new(space: Arc<TruncatedSpace>, entries: CMatrix) -> Result<Self> {
        let d = space.dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: entries.nrows(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        Ok(OperatorMatrix {
            space,
            entries,
            warnings: Vec::new(),
        })
    }

    pub(crate) fn from_parts(space: Arc<TruncatedSpace>, entries: CMatrix) -> Self {
        debug_assert_eq!(entries.nrows(), space.dim());
        OperatorMatrix {
            space,
            entries,
            warnings: Vec::new(),
        }
    }

    pub fn zeros(space: &Arc<TruncatedSpace>) -> Self {
        let d = space.dim();
        Self::from_parts(space.clone(), CMatrix::zeros(d, d))
    }

    pub fn identity(space: &Arc<TruncatedSpace>) -> Self {
        let d = space.dim();
        Self::from_parts(space.clone(), CMatrix::identity(d, d))
    }

    /// Matrix unit `E_{jk} = e_j ⊗ e_k`.
    pub fn matrix_unit(space: &Arc<TruncatedSpace>, j: usize, k: usize) -> Self {
        Self::from_parts(space.clone(), linalg::matrix_unit(space.dim(), j, k))
    }

    pub fn space(&self) -> &Arc<TruncatedSpace> {
        &self.space
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub(crate) fn push_warning(&mut self, w: String) {
        debug!("{w}");
        self.warnings.push(w);
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.space.clone(), self.entries.adjoint())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::from_parts(self.space.clone(), &self.entries * &other.entries)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_parts(self.space.clone(), &self.entries + &other.entries)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_parts(self.space.clone(), &self.entries - &other.entries)
    }

    pub fn scale(&self, lambda: C64) -> Self {
        Self::from_parts(self.space.clone(), self.entries.map(|z| z * lambda))
    }

    pub fn map_entries(&self, f: impl Fn(CMatrix) -> CMatrix) -> Self {
        Self::from_parts(self.space.clone(), f(self.entries.clone()))
    }

    pub fn block(&self, size: usize) -> CMatrix {
        linalg::leading_block(&self.entries, size)
    }

    /// Leading block on which translation identities are asserted.
    pub fn leading(&self) -> CMatrix {
        self.block(self.space.leading_block())
    }

    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.entries)
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.entries)
    }

    pub fn trace_norm(&self) -> f64 {
        linalg::trace_norm(&self.entries)
    }

    /// `S e_j` as a coefficient vector.
    pub fn apply_basis(&self, j: usize) -> Vec<C64> {
        self.entries.column(j).iter().copied().collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.envelope())?)
    }

    pub fn envelope(&self) -> MatrixEnvelope {
        MatrixEnvelope {
            dim: self.dim(),
            n: self.space.n(),
            degree: self.space.degree(),
            entries: self
                .entries
                .transpose()
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
        }
    }

    pub fn from_json(space: &Arc<TruncatedSpace>, json: &str) -> Result<Self> {
        let env: MatrixEnvelope = serde_json::from_str(json)?;
        if env.n != space.n() || env.degree != space.degree() || env.dim != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                actual: env.dim,
            });
        }
        if env.entries.len() != env.dim * env.dim {
            return Err(Error::DimensionMismatch {
                expected: env.dim * env.dim,
                actual: env.entries.len(),
            });
        }
        let m = CMatrix::from_row_iterator(
            env.dim,
            env.dim,
            env.entries.iter().map(|p| C64::new(p[0], p[1])),
        );
        OperatorMatrix::new(space.clone(), m)
    }
}

/// Serialized form: row-major `(re, im)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixEnvelope {
    pub dim: usize,
    pub n: usize,
    #[serde(rename = "N")]
    pub degree: usize,
    pub entries: Vec<[f64; 2]>,
}

/// Symbol values on the quadrature nodes, rejecting non-finite ones.
pub(crate) fn symbol_on_nodes(space: &TruncatedSpace, a: &Symbol) -> Result<Vec<C64>> {
    let q = space.quadrature();
    (0..q.len())
        .into_par_iter()
        .map(|i| {
            let z = q.node(i);
            let v = a.eval(z);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteSymbol {
                    label: a.label().to_string(),
                    point: format!("{z:?}"),
                });
            }
            Ok(v)
        })
        .collect()
}

/// `T_a`: entries `∫ a e_k conj(e_j) dμ` under the space's quadrature.
pub fn toeplitz(space: &Arc<TruncatedSpace>, a: &Symbol) -> Result<OperatorMatrix> {
    let values = symbol_on_nodes(space, a)?;
    let e = space.basis_at_nodes();
    let m = weighted_gram(&e, &space.quadrature().weights, &values);
    let mut op = OperatorMatrix::from_parts(space.clone(), m);
    if a.sup_bound().is_none() {
        op.push_warning(format!("symbol `{}` has no sup bound", a.label()));
    }
    Ok(op)
}

/// `T_a = ∫ â(ξ) e^{-π|ξ|²/2} W_{-iξ} dξ`, discretized as
/// `Σ c_m e^{-π|ξ_m|²} Ŵ_{-iξ_m}` with `c_m = â(ξ_m) Δ` supplied by the caller.
///
/// Frequencies are points of `ℂⁿ ≅ ℝ^{2n}` under `Re⟨z, ξ⟩`.
pub fn toeplitz_from_spectrum(
    space: &Arc<TruncatedSpace>,
    terms: &[(Vec<C64>, C64)],
) -> Result<OperatorMatrix> {
    space.require_fock("toeplitz_from_spectrum")?;
    let d = space.dim();
    let chunks: Vec<CMatrix> = {
        use rayon::prelude::*;
        terms
            .par_chunks(64)
            .map(|chunk| {
                let mut acc = CMatrix::zeros(d, d);
                for (xi, coef) in chunk {
                    if *coef == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let u: Vec<C64> = xi.iter().map(|v| v * C64::new(0.0, -1.0)).collect();
                    let w = weyl_unscaled(space, &u);
                    let g = (-PI * norm_sqr(&u)).exp();
                    acc += w * (coef * g);
                }
                acc
            })
            .collect()
    };
    let mut m = CMatrix::zeros(d, d);
    for c in chunks {
        m += c;
    }
    Ok(OperatorMatrix::from_parts(space.clone(), m))
}

/// Polynomial part `Ŵ_z` of the one-dimensional Weyl matrix, `W_z = e^{-π|z|²/2} Ŵ_z`.
///
/// With `x = π|z|²`, `(Ŵ_z)_{jk}` equals `√(k!/j!) (√π z̄)^{j-k} L_k^{(j-k)}(x)`
/// for `j ≥ k` and `√(j!/k!) (-√π z)^{k-j} L_j^{(k-j)}(x)` otherwise.
pub fn weyl_1d_unscaled(z: C64, degree: usize) -> CMatrix {
    let m = degree + 1;
    let x = PI * z.norm_sqr();
    let sp = PI.sqrt();
    let lower = z.conj() * sp;
    let upper = -z * sp;
    let mut w = CMatrix::zeros(m, m);
    // Column/row pairs sharing the offset d = |j - k| share a Laguerre family.
    for d in 0..m {
        let alpha = d as f64;
        let mut l_prev = 0.0;
        let mut l = 1.0;
        let mut ratio = 1.0_f64; // √(k!/(k+d)!)
        for i in 1..=d {
            ratio /= (i as f64).sqrt();
        }
        let pow_lower = lower.powu(d as u32);
        let pow_upper = upper.powu(d as u32);
        for kk in 0..(m - d) {
            if kk > 0 {
                let kf = (kk - 1) as f64;
                let next = ((2.0 * kf + 1.0 + alpha - x) * l - (kf + alpha) * l_prev) / (kf + 1.0);
                l_prev = l;
                l = next;
                ratio *= ((kk as f64) / ((kk + d) as f64)).sqrt();
            }
            let base = ratio * l;
            w[(kk + d, kk)] = pow_lower * base;
            if d > 0 {
                w[(kk, kk + d)] = pow_upper * base;
            }
        }
    }
    w
}

/// Polynomial part of the Weyl matrix on the truncated multi-index basis.
pub(crate) fn weyl_unscaled(space: &TruncatedSpace, z: &[C64]) -> CMatrix {
    let deg = space.degree();
    let factors: Vec<CMatrix> = z.iter().map(|&zi| weyl_1d_unscaled(zi, deg)).collect();
    let d = space.dim();
    if space.n() == 1 {
        return factors.into_iter().next().expect("n = 1");
    }
    let idx = space.indices();
    let mut w = CMatrix::zeros(d, d);
    for (a, ja) in idx.iter().enumerate() {
        for (b, kb) in idx.iter().enumerate() {
            let mut v = C64::new(1.0, 0.0);
            for (i, f) in factors.iter().enumerate() {
                v *= f[(ja.0[i], kb.0[i])];
                if v == C64::new(0.0, 0.0) {
                    break;
                }
            }
            w[(a, b)] = v;
        }
    }
    w
}

/// Weyl matrix `W_z` from the closed Laguerre form; attaches a warning when the
/// leading-block columns lose more than `1e-6` of their norm to truncation.
pub fn weyl(space: &Arc<TruncatedSpace>, z: &[C64]) -> Result<OperatorMatrix> {
    space.require_fock("weyl")?;
    check_point(space, z)?;
    let g = (-PI * norm_sqr(z) / 2.0).exp();
    let m = weyl_unscaled(space, z) * C64::new(g, 0.0);
    let mut op = OperatorMatrix::from_parts(space.clone(), m);
    let tail = weyl_tail(&op);
    if tail > 1e-6 {
        op.push_warning(format!(
            "weyl({z:?}): truncation tail {tail:.3e} exceeds 1e-6 on the leading block"
        ));
    }
    Ok(op)
}

/// Weyl matrix assembled entry by entry from quadrature of `⟨W_z e_k, e_j⟩`.
pub fn weyl_by_quadrature(space: &Arc<TruncatedSpace>, z: &[C64]) -> Result<OperatorMatrix> {
    space.require_fock("weyl_by_quadrature")?;
    check_point(space, z)?;
    let q = space.quadrature();
    let e = space.basis_at_nodes();
    let g = (-PI * norm_sqr(z) / 2.0).exp();
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    for (i, w) in q.nodes().enumerate() {
        let shifted: Vec<C64> = w.iter().zip(z).map(|(a, b)| a - b).collect();
        let kz = (crate::fock::pairing(w, z) * PI).exp() * g;
        let moved = space.basis_values(&shifted);
        let s = kz * q.weights[i];
        for j in 0..d {
            let ej = e[(i, j)].conj() * s;
            for k in 0..d {
                m[(j, k)] += ej * moved[k];
            }
        }
    }
    Ok(OperatorMatrix::from_parts(space.clone(), m))
}

/// `max_k (1 - ‖P W e_k‖²)` over leading-block columns.
pub fn weyl_tail(w: &OperatorMatrix) -> f64 {
    let lead = w.space().leading_block();
    (0..lead)
        .map(|k| 1.0 - w.entries().column(k).norm_squared())
        .fold(0.0_f64, f64::max)
}

fn check_point(space: &TruncatedSpace, z: &[C64]) -> Result<()> {
    if z.len() != space.n() {
        return Err(Error::DimensionMismatch {
            expected: space.n(),
            actual: z.len(),
        });
    }
    Ok(())
}

/// `α_z S = W_z S W_z^†`.
pub fn translate_op(space: &Arc<TruncatedSpace>, z: &[C64], s: &OperatorMatrix) -> Result<OperatorMatrix> {
    let w = weyl(space, z)?;
    let mut out = OperatorMatrix::from_parts(space.clone(), linalg::conjugate(w.entries(), s.entries()));
    for warning in w.warnings {
        out.push_warning(warning);
    }
    Ok(out)
}

/// `(Uf)(z) = f(-z)`: `diag((-1)^{|k|})`.
pub fn parity(space: &Arc<TruncatedSpace>) -> OperatorMatrix {
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    for (i, k) in space.indices().iter().enumerate() {
        m[(i, i)] = C64::new(if k.degree() % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    OperatorMatrix::from_parts(space.clone(), m)
}

/// `Φ = k_0 ⊗ k_0 = e_0 ⊗ e_0`.
pub fn phi_op(space: &Arc<TruncatedSpace>) -> Result<OperatorMatrix> {
    space.require_fock("phi_op")?;
    Ok(OperatorMatrix::matrix_unit(space, 0, 0))
}

pub fn op_norm_estimate(s: &OperatorMatrix) -> f64 {
    s.norm()
}

pub fn trace(s: &OperatorMatrix) -> C64 {
    s.trace()
}

/// What a Berezin transform is taken of.
#[derive(Clone, Debug)]
pub enum BerezinSource {
    Operator(OperatorMatrix),
    /// `B(a) = φ ∗ a`, integrated by Gauss–Hermite against `φ`.
    Symbol(Symbol),
}

/// Evaluator `z ↦ ⟨S k_z, k_z⟩` (or `(φ ∗ a)(z)` for a symbol).
#[derive(Clone, Debug)]
pub struct BerezinFunction {
    source: BerezinSource,
    n: usize,
    gh_order: usize,
}

impl BerezinFunction {
    pub fn source(&self) -> &BerezinSource {
        &self.source
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        match &self.source {
            BerezinSource::Operator(s) => {
                let v = kernel_coeffs_unchecked(s.space(), z);
                let sv = s.entries() * &v;
                v.dotc(&sv)
            }
            BerezinSource::Symbol(a) => gaussian_average(a, z, self.gh_order),
        }
    }

    /// `tr(S Ŵ_{iξ})`, so that `B̂(S)(ξ) = e^{-π|ξ|²} tr(S Ŵ_{iξ})`.
    pub fn spectral_cofactor(&self, xi: &[C64]) -> Option<C64> {
        match &self.source {
            BerezinSource::Operator(s) => {
                let u: Vec<C64> = xi.iter().map(|v| v * C64::new(0.0, 1.0)).collect();
                let w = weyl_unscaled(s.space(), &u);
                Some((s.entries() * w).trace())
            }
            BerezinSource::Symbol(_) => None,
        }
    }

    pub fn to_symbol(&self) -> Symbol {
        let me = self.clone();
        Symbol::from_fn("berezin", crate::symbol::SymbolKind::Composite, self.n, move |z| me.eval(z))
    }
}

/// `B(S)(z) = v_z^† S v_z`.
pub fn berezin(space: &Arc<TruncatedSpace>, s: &OperatorMatrix) -> Result<BerezinFunction> {
    space.require_fock("berezin")?;
    Ok(BerezinFunction {
        source: BerezinSource::Operator(s.clone()),
        n: space.n(),
        gh_order: 0,
    })
}

/// `B(a) = φ ∗ a` for a symbol, by `order`-point Gauss–Hermite per real axis.
pub fn berezin_symbol(a: &Symbol, order: usize) -> BerezinFunction {
    BerezinFunction {
        source: BerezinSource::Symbol(a.clone()),
        n: a.n(),
        gh_order: order,
    }
}

/// `∫ e^{-π|w|²} a(z - w) dw` by product Gauss–Hermite.
fn gaussian_average(a: &Symbol, z: &[C64], order: usize) -> C64 {
    let gh = gauss_hermite(order);
    let scale = 1.0 / PI.sqrt();
    let n = z.len();
    let axes = 2 * n;
    let mut idx = vec![0usize; axes];
    let mut acc = C64::new(0.0, 0.0);
    let mut point = vec![C64::new(0.0, 0.0); n];
    for _ in 0..order.pow(axes as u32) {
        let mut w = 1.0;
        for j in 0..n {
            let x = gh.nodes[idx[2 * j]] * scale;
            let y = gh.nodes[idx[2 * j + 1]] * scale;
            w *= gh.weights[idx[2 * j]] * gh.weights[idx[2 * j + 1]] * scale * scale;
            point[j] = z[j] - C64::new(x, y);
        }
        acc += a.eval(&point) * w;
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < order {
                break;
            }
            *slot = 0;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::SpaceKind;
    use crate::linalg::{c, frobenius, max_abs};

    fn fock(n: usize, deg: usize) -> Arc<TruncatedSpace> {
        TruncatedSpace::fock(n, deg).unwrap()
    }

    #[test]
    fn toeplitz_examples() {
        let s = fock(1, 16);
        let one = toeplitz(&s, &Symbol::constant(1, c(1.0, 0.0))).unwrap();
        assert!(max_abs(&(one.entries() - CMatrix::identity(17, 17))) < 1e-12);
        let t = toeplitz(&s, &Symbol::phi(1)).unwrap();
        for k in 0..17 {
            assert!((t.entries()[(k, k)].re - 0.5f64.powi(k as i32 + 1)).abs() < 1e-12);
        }
        let m = toeplitz(&s, &Symbol::modulus_squared(1)).unwrap();
        assert!(!m.warnings().is_empty());
        for k in 0..17 {
            assert!((m.entries()[(k, k)].re - (k as f64 + 1.0) / PI).abs() < 1e-10);
        }
    }

    #[test]
    fn toeplitz_hermitian_exactly_for_real_symbols() {
        let s = fock(1, 12);
        let a = Symbol::from_fn("real", crate::symbol::SymbolKind::Composite, 1, |z| {
            c((z[0].re * 1.3).sin() + z[0].im, 0.0)
        });
        let t = toeplitz(&s, &a).unwrap();
        assert_eq!(t.entries(), &t.entries().adjoint());
    }

    #[test]
    fn weyl_closed_form_matches_quadrature() {
        let s = fock(1, 16);
        for z in [c(0.3, -0.2), c(-0.9, 0.6), c(1.2, 0.4)] {
            let a = weyl(&s, &[z]).unwrap();
            let b = weyl_by_quadrature(&s, &[z]).unwrap();
            assert!(max_abs(&(a.entries() - b.entries())) < 1e-9, "z = {z}");
            assert!((a.entries()[(0, 0)].re - (-PI * z.norm_sqr() / 2.0).exp()).abs() < 1e-14);
        }
        let s2 = TruncatedSpace::new(SpaceKind::Fock, 2, 6, Some((24, 0))).unwrap();
        let z = [c(0.3, 0.1), c(-0.2, 0.4)];
        let a = weyl(&s2, &z).unwrap();
        let b = weyl_by_quadrature(&s2, &z).unwrap();
        assert!(max_abs(&(a.entries() - b.entries())) < 1e-9);
    }

    #[test]
    fn weyl_is_identity_at_origin_and_near_unitary() {
        let s = fock(1, 16);
        let w0 = weyl(&s, &[c(0.0, 0.0)]).unwrap();
        assert!(max_abs(&(w0.entries() - CMatrix::identity(17, 17))) < 1e-15);
        let w = weyl(&s, &[c(0.3, -0.2)]).unwrap();
        assert!(weyl_tail(&w) < 1e-5);
        assert!(!weyl(&s, &[c(1.2, 0.4)]).unwrap().warnings().is_empty());
        let lead = s.leading_block();
        let g = linalg::leading_block(&(w.entries().adjoint() * w.entries()), lead);
        assert!(max_abs(&(g - CMatrix::identity(lead, lead))) < 1e-5);
    }

    #[test]
    fn weyl_relation_is_projective() {
        let s = fock(1, 32);
        let z = c(0.4, 0.1);
        let w = c(-0.2, 0.5);
        let lhs = weyl(&s, &[z]).unwrap().compose(&weyl(&s, &[w]).unwrap());
        let rhs = weyl(&s, &[z + w]).unwrap();
        let phase = C64::from_polar(1.0, PI * (z.conj() * w).im);
        let lead = s.leading_block();
        let diff = lhs.block(lead) - rhs.block(lead) * phase;
        assert!(max_abs(&diff) < 1e-8);
    }

    #[test]
    fn plane_wave_toeplitz_is_scaled_weyl() {
        let s = fock(1, 16);
        let xi = c(0.5, 0.3);
        let t = toeplitz(&s, &Symbol::plane_wave(vec![xi])).unwrap();
        let spectral = toeplitz_from_spectrum(&s, &[(vec![xi], c(1.0, 0.0))]).unwrap();
        assert!(max_abs(&(t.entries() - spectral.entries())) < 1e-10);
    }

    #[test]
    fn parity_and_phi() {
        let s = fock(2, 6);
        let u = parity(&s);
        assert_eq!(u.compose(&u).entries(), &CMatrix::identity(s.dim(), s.dim()));
        let phi = phi_op(&s).unwrap();
        assert_eq!(phi.trace(), c(1.0, 0.0));
        assert_eq!(phi.compose(&phi).entries(), phi.entries());
        assert_eq!(u.compose(&phi).compose(&u).entries(), phi.entries());
        let b = TruncatedSpace::new(SpaceKind::Bergman, 1, 4, None).unwrap();
        assert!(phi_op(&b).is_err());
    }

    #[test]
    fn translate_op_of_toeplitz() {
        // Degree-7 columns of W_z leak past N = 16 at |z| = 1; N = 32 contains them.
        let s = fock(1, 32);
        let a = crate::symbol::registry(1).remove(3);
        let ta = toeplitz(&s, &a).unwrap();
        let z = [c(0.6, -0.7)];
        let moved = translate_op(&s, &z, &ta).unwrap();
        let direct = toeplitz(&s, &a.translated(&z)).unwrap();
        assert!(frobenius(&(moved.block(8) - direct.block(8))) < 1e-6);
    }

    #[test]
    fn berezin_examples() {
        let s = fock(1, 16);
        let id = OperatorMatrix::identity(&s);
        let b = berezin(&s, &id).unwrap();
        assert!(b.eval(&[C64::from_polar(1.0, 0.3)]).re >= 1.0 - 1e-6);
        let phi = phi_op(&s).unwrap();
        let bp = berezin(&s, &phi).unwrap();
        let z = [c(0.7, 0.9)];
        assert!((bp.eval(&z).re - (-PI * norm_sqr(&z)).exp()).abs() < 1e-15);
        let tphi = toeplitz(&s, &Symbol::phi(1)).unwrap();
        let bt = berezin(&s, &tphi).unwrap();
        let z = [c(0.4, -0.3)];
        assert!((bt.eval(&z).re - 0.5 * (-PI * norm_sqr(&z) / 2.0).exp()).abs() < 1e-10);
    }

    #[test]
    fn berezin_of_toeplitz_equals_gaussian_average() {
        let s = fock(1, 24);
        for a in crate::symbol::registry(1) {
            let ta = toeplitz(&s, &a).unwrap();
            let bt = berezin(&s, &ta).unwrap();
            let ba = berezin_symbol(&a, 40);
            for z in [c(0.0, 0.0), c(0.5, 0.5), c(-0.9, 0.2)] {
                assert!((bt.eval(&[z]) - ba.eval(&[z])).norm() < 1e-6, "{}", a.label());
            }
        }
    }

    #[test]
    fn berezin_spectral_cofactor_matches_fft_of_samples() {
        // For S = Φ, B(S) = φ whose spectrum is e^{-π|ξ|²}: cofactor ≡ 1.
        let s = fock(1, 12);
        let b = berezin(&s, &phi_op(&s).unwrap()).unwrap();
        let v = b.spectral_cofactor(&[c(0.7, -1.1)]).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-14);
        // For T_{e_ξ0}, B̂ = e^{-π|ξ0|²} δ_{ξ0}; the cofactor pairs with the
        // Weyl expansion, checked here at ξ = 0: tr(T_a) for a plane wave.
        let t = toeplitz(&s, &Symbol::plane_wave(vec![c(0.2, 0.1)])).unwrap();
        let bt = berezin(&s, &t).unwrap();
        assert!((bt.spectral_cofactor(&[c(0.0, 0.0)]).unwrap() - t.trace()).norm() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let s = fock(1, 4);
        let w = weyl(&s, &[c(0.2, 0.3)]).unwrap();
        let json = w.to_json().unwrap();
        assert!(json.contains("\"N\":4"));
        let back = OperatorMatrix::from_json(&s, &json).unwrap();
        assert_eq!(back.entries(), w.entries());
    }
}
