//! Truncated monomial models of the Fock space `F²(ℂⁿ)` and the Bergman
//! space `A²(Bⁿ)`.
//!
//! The basis is `e_k = c_k z^k` for multi-indices with `|k| ≤ N`, ordered by
//! total degree and then lexicographically descending, so every leading block
//! is a union of whole degree shells.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMatrix, CVector, C64};
use crate::quadrature::{gauss_laguerre, unit_interval_jacobi};

/// Which measure the truncation models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Fock,
    Bergman,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Fock => write!(f, "fock"),
            SpaceKind::Bergman => write!(f, "bergman"),
        }
    }
}

/// Exponent tuple of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `k! = Π k_i!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Multi-indices of length `n` and total degree exactly `d`, lexicographically descending.
pub fn indices_of_degree(n: usize, d: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, d: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if n == 1 {
            prefix.push(d);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=d).rev() {
            prefix.push(first);
            rec(n - 1, d - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Nodes in `ℂⁿ` (stored flat) and positive weights whose sum is the total mass.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub n: usize,
    nodes: Vec<C64>,
    pub weights: Vec<f64>,
    /// Radial points per coordinate.
    pub order: usize,
    /// Angular points per coordinate.
    pub angular: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[C64] {
        &self.nodes[i * self.n..(i + 1) * self.n]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[C64]> {
        self.nodes.chunks(self.n)
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ w_i f(z_i)` in node order.
    pub fn integrate<F: Fn(&[C64]) -> C64>(&self, f: F) -> C64 {
        self.nodes()
            .zip(&self.weights)
            .fold(C64::new(0.0, 0.0), |acc, (z, &w)| acc + f(z) * w)
    }
}

/// Finite model of `F²(ℂⁿ)` or `A²(Bⁿ)` spanned by monomials of degree ≤ `N`.
#[derive(Clone, Debug)]
pub struct TruncatedSpace {
    n: usize,
    degree: usize,
    kind: SpaceKind,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    coeffs: Vec<f64>,
    quadrature: QuadratureRule,
    basis_cache: OnceLock<Arc<CMatrix>>,
}

impl TruncatedSpace {
    /// Fock truncation with the default quadrature order.
    pub fn fock(n: usize, degree: usize) -> Result<Arc<Self>> {
        Self::new(SpaceKind::Fock, n, degree, None)
    }

    /// Bergman truncation with the default quadrature order.
    pub fn bergman(n: usize, degree: usize) -> Result<Arc<Self>> {
        Self::new(SpaceKind::Bergman, n, degree, None)
    }

    /// Builds the space with an explicit quadrature `(order, angular)`; an
    /// angular count of zero means `4N + 16`.
    pub fn new(
        kind: SpaceKind,
        n: usize,
        degree: usize,
        order: Option<(usize, usize)>,
    ) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::InvalidArgument("complex dimension must be positive".into()));
        }
        let mut indices = Vec::with_capacity(binomial(n + degree, n));
        for d in 0..=degree {
            indices.extend(indices_of_degree(n, d));
        }
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let coeffs = indices.iter().map(|k| norm_coefficient(kind, n, k)).collect();
        let (order, angular) = order.unwrap_or_else(|| default_order(kind, n, degree));
        let angular = if angular == 0 { 4 * degree + 16 } else { angular };
        let quadrature = build_quadrature_rule(kind, n, order, angular);
        let space = TruncatedSpace {
            n,
            degree,
            kind,
            indices,
            lookup,
            coeffs,
            quadrature,
            basis_cache: OnceLock::new(),
        };
        let deviation = space.gram_deviation();
        if deviation > 1e-10 || !deviation.is_finite() {
            return Err(Error::InsufficientQuadrature { order, deviation });
        }
        Ok(Arc::new(space))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Truncation degree `N`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.lookup.get(k).copied()
    }

    /// Normalizing constant `c_k` with `‖c_k z^k‖ = 1`.
    pub fn coefficient(&self, i: usize) -> f64 {
        self.coeffs[i]
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quadrature
    }

    /// Size of the block `|k| ≤ ⌊N/2⌋` on which translation identities are asserted.
    pub fn leading_block(&self) -> usize {
        binomial(self.n + self.degree / 2, self.n)
    }

    /// Number of basis vectors of degree ≤ `d`.
    pub fn block_size(&self, d: usize) -> usize {
        binomial(self.n + d.min(self.degree), self.n)
    }

    pub fn is_fock(&self) -> bool {
        self.kind == SpaceKind::Fock
    }

    pub(crate) fn require_fock(&self, op: &'static str) -> Result<()> {
        if self.is_fock() {
            Ok(())
        } else {
            Err(Error::RequiresFock(op))
        }
    }

    /// Values `e_k(z)` for every basis index.
    pub fn basis_values(&self, z: &[C64]) -> CVector {
        let powers = self.powers(z);
        CVector::from_iterator(
            self.dim(),
            self.indices.iter().zip(&self.coeffs).map(|(k, &ck)| {
                k.0.iter()
                    .enumerate()
                    .fold(C64::new(ck, 0.0), |acc, (j, &kj)| acc * powers[j][kj])
            }),
        )
    }

    fn powers(&self, z: &[C64]) -> Vec<Vec<C64>> {
        z.iter()
            .map(|&zj| {
                let mut p = Vec::with_capacity(self.degree + 1);
                let mut acc = C64::new(1.0, 0.0);
                for _ in 0..=self.degree {
                    p.push(acc);
                    acc *= zj;
                }
                p
            })
            .collect()
    }

    /// Matrix `E` with `E[i, k] = e_k(z_i)` over the quadrature nodes.
    pub fn basis_at_nodes(&self) -> Arc<CMatrix> {
        self.basis_cache
            .get_or_init(|| {
                let q = &self.quadrature;
                let mut e = CMatrix::zeros(q.len(), self.dim());
                for (i, z) in q.nodes().enumerate() {
                    let v = self.basis_values(z);
                    e.row_mut(i).copy_from(&v.transpose());
                }
                Arc::new(e)
            })
            .clone()
    }

    /// Gram matrix `⟨e_k, e_j⟩` under the quadrature.
    pub fn gram(&self) -> CMatrix {
        let weights = vec![C64::new(1.0, 0.0); self.quadrature.len()];
        weighted_gram(&self.basis_at_nodes(), &self.quadrature.weights, &weights)
    }

    /// Max-entry deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.gram() - CMatrix::identity(d, d)))
    }
}

/// `M[j, k] = Σ_i w_i a_i conj(E[i, j]) E[i, k]`, accumulated in node order.
///
/// `M = R + iJ` with `R`, `J` the Hermitian sums for `Re a`, `Im a`; only their
/// upper triangles are accumulated, so `M` is exactly Hermitian whenever every
/// `a_i` is real.
pub(crate) fn weighted_gram(e: &CMatrix, weights: &[f64], values: &[C64]) -> CMatrix {
    let (nodes, dim) = e.shape();
    let tri = dim * (dim + 1) / 2;
    // Fixed chunks summed in order keep the result independent of thread count.
    let parts: Vec<(Vec<C64>, Vec<C64>)> = (0..nodes)
        .step_by(GRAM_CHUNK)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&lo| {
            let mut re = vec![C64::new(0.0, 0.0); tri];
            let mut im = vec![C64::new(0.0, 0.0); tri];
            let mut row = vec![C64::new(0.0, 0.0); dim];
            for i in lo..(lo + GRAM_CHUNK).min(nodes) {
                let s = values[i] * weights[i];
                if s == C64::new(0.0, 0.0) {
                    continue;
                }
                for (k, r) in row.iter_mut().enumerate() {
                    *r = e[(i, k)];
                }
                let mut t = 0;
                for j in 0..dim {
                    let ej = row[j].conj();
                    for &ek in &row[j..] {
                        let p = ej * ek;
                        re[t] += p * s.re;
                        im[t] += p * s.im;
                        t += 1;
                    }
                }
            }
            (re, im)
        })
        .collect();
    let mut re = vec![C64::new(0.0, 0.0); tri];
    let mut im = vec![C64::new(0.0, 0.0); tri];
    for (r, j) in parts {
        for t in 0..tri {
            re[t] += r[t];
            im[t] += j[t];
        }
    }
    let i = C64::new(0.0, 1.0);
    let mut m = CMatrix::zeros(dim, dim);
    let mut t = 0;
    for j in 0..dim {
        for k in j..dim {
            m[(j, k)] = re[t] + i * im[t];
            if k != j {
                m[(k, j)] = re[t].conj() + i * im[t].conj();
            }
            t += 1;
        }
    }
    m
}

const GRAM_CHUNK: usize = 2048;

fn norm_coefficient(kind: SpaceKind, n: usize, k: &MultiIndex) -> f64 {
    match kind {
        SpaceKind::Fock => (PI.powi(k.degree() as i32) / k.factorial()).sqrt(),
        SpaceKind::Bergman => {
            (factorial(n + k.degree()) / (factorial(n) * k.factorial())).sqrt()
        }
    }
}

fn default_order(kind: SpaceKind, n: usize, degree: usize) -> (usize, usize) {
    match (kind, n) {
        (SpaceKind::Fock, 1) => ((degree + 16).max(32), 4 * degree + 16),
        (SpaceKind::Fock, 2) => (degree + 4, 2 * degree + 8),
        (SpaceKind::Fock, _) => (degree / 2 + 2, 2 * degree + 2),
        (SpaceKind::Bergman, 1) => (64.max(degree + 8), 128.max(2 * degree + 8)),
        (SpaceKind::Bergman, _) => (degree + 4, 2 * degree + 4),
    }
}

/// Quadrature for the space's measure.
///
/// Both kinds are products of a radial rule and uniform angles in each
/// coordinate, so torus characters are integrated exactly up to the angular
/// count. Fock: `s = π|z_j|²` carries `e^{-s} ds dθ/2π`, handled by
/// Gauss–Laguerre. Bergman: with `s_j = |z_j|²` the
/// normalized volume is `n!/(2π)ⁿ ds dθ` over the simplex `Σ s_j ≤ 1` times
/// the torus; the simplex is collapsed onto the cube by
/// `s_i = u_i Π_{l<i} (1 - u_l)` with Jacobian `Π_l (1 - u_l)^{n-l}`, which is
/// absorbed into Gauss–Jacobi weights. Angles are uniform.
pub fn build_quadrature(space: &TruncatedSpace, order: usize, angular: usize) -> QuadratureRule {
    let angular = if angular == 0 { 4 * space.degree + 16 } else { angular };
    build_quadrature_rule(space.kind, space.n, order, angular)
}

fn build_quadrature_rule(kind: SpaceKind, n: usize, order: usize, angular: usize) -> QuadratureRule {
    match kind {
        SpaceKind::Fock => {
            // Per coordinate: s = π|z|² carries e^{-s} ds, angles are uniform.
            let gl = gauss_laguerre(order);
            let dtheta = 1.0 / angular as f64;
            let coord: Vec<(C64, f64)> = gl
                .nodes
                .iter()
                .zip(&gl.weights)
                .flat_map(|(&sv, &w)| {
                    let r = (sv / PI).sqrt();
                    (0..angular).map(move |a| (C64::from_polar(r, 2.0 * PI * a as f64 * dtheta), w * dtheta))
                })
                .collect();
            let per = coord.len();
            let count = per.pow(n as u32);
            let mut nodes = Vec::with_capacity(count * n);
            let mut weights = Vec::with_capacity(count);
            let mut idx = vec![0usize; n];
            for _ in 0..count {
                let mut w = 1.0;
                for &i in &idx {
                    nodes.push(coord[i].0);
                    w *= coord[i].1;
                }
                weights.push(w);
                advance(&mut idx, per);
            }
            QuadratureRule {
                n,
                nodes,
                weights,
                order,
                angular,
            }
        }
        SpaceKind::Bergman => {
            let rules: Vec<_> = (1..=n).map(|l| unit_interval_jacobi(order, (n - l) as f64)).collect();
            let norm = factorial(n);
            let dtheta = 1.0 / angular as f64;
            let radial_count = order.pow(n as u32);
            let angular_count = angular.pow(n as u32);
            let mut nodes = Vec::with_capacity(radial_count * angular_count * n);
            let mut weights = Vec::with_capacity(radial_count * angular_count);
            let mut ridx = vec![0usize; n];
            for _ in 0..radial_count {
                let mut s = vec![0.0; n];
                let mut rest = 1.0;
                let mut wr = norm;
                for l in 0..n {
                    let u = rules[l].nodes[ridx[l]];
                    s[l] = rest * u;
                    rest *= 1.0 - u;
                    wr *= rules[l].weights[ridx[l]];
                }
                let radii: Vec<f64> = s.iter().map(|v| v.max(0.0).sqrt()).collect();
                let mut aidx = vec![0usize; n];
                for _ in 0..angular_count {
                    for l in 0..n {
                        let theta = 2.0 * PI * aidx[l] as f64 * dtheta;
                        nodes.push(C64::from_polar(radii[l], theta));
                    }
                    weights.push(wr * dtheta.powi(n as i32));
                    advance(&mut aidx, angular);
                }
                advance(&mut ridx, order);
            }
            QuadratureRule {
                n,
                nodes,
                weights,
                order,
                angular,
            }
        }
    }
}

fn advance(idx: &mut [usize], base: usize) {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return;
        }
        *slot = 0;
    }
}

/// `e_k(z)` for a multi-index `k`.
pub fn basis_eval(space: &TruncatedSpace, k: &MultiIndex, z: &[C64]) -> Result<C64> {
    if k.len() != space.n() {
        return Err(Error::DimensionMismatch {
            expected: space.n(),
            actual: k.len(),
        });
    }
    if z.len() != space.n() {
        return Err(Error::DimensionMismatch {
            expected: space.n(),
            actual: z.len(),
        });
    }
    if k.degree() > space.degree() {
        return Err(Error::DegreeOverflow {
            degree: k.degree(),
            max: space.degree(),
        });
    }
    let ck = norm_coefficient(space.kind(), space.n(), k);
    Ok(k
        .0
        .iter()
        .zip(z)
        .fold(C64::new(ck, 0.0), |acc, (&kj, &zj)| acc * zj.powu(kj as u32)))
}

/// `⟨w, z⟩ = Σ w_j conj(z_j)`.
pub fn pairing(w: &[C64], z: &[C64]) -> C64 {
    w.iter().zip(z).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sqr(z: &[C64]) -> f64 {
    z.iter().map(|v| v.norm_sqr()).sum()
}

/// Fock reproducing kernel `K_z(w) = e^{π⟨w, z⟩}`.
pub fn kernel(space: &TruncatedSpace, z: &[C64], w: &[C64]) -> Result<C64> {
    space.require_fock("kernel")?;
    Ok((pairing(w, z) * PI).exp())
}

/// Coefficients of `k_z` in the truncated basis: `e^{-π|z|²/2} conj(e_k(z))`.
pub fn normalized_kernel_coeffs(space: &TruncatedSpace, z: &[C64]) -> Result<CVector> {
    space.require_fock("normalized_kernel_coeffs")?;
    Ok(kernel_coeffs_unchecked(space, z))
}

pub(crate) fn kernel_coeffs_unchecked(space: &TruncatedSpace, z: &[C64]) -> CVector {
    let g = (-PI * norm_sqr(z) / 2.0).exp();
    space.basis_values(z).map(|v| v.conj() * g)
}
