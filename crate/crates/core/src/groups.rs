//! Subgroups of `Uₙ ⋉ ℂⁿ`, their actions on points, symbols and operators,
//! group convolutions and invariance projections.
//!
//! `g = (A, z)` acts by `w ↦ A w + z`; `π(g) = W_z R_A` with
//! `(R_A f)(w) = f(A^{-1} w)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conv::{translation_sum, ConvQuadrature};
use crate::error::{Error, Result};
use crate::fock::{MultiIndex, TruncatedSpace};
use crate::linalg::{self, CMatrix, C64};
use crate::operators::{weyl, OperatorMatrix};
use crate::quadrature::unit_interval_jacobi;
use crate::symbol::{Symbol, SymbolKind};

/// Unitarity defect above which a group element is rejected.
pub const UNITARY_TOL: f64 = 1e-12;

const CHUNK: usize = 32;

/// `(A, z)` with `A` unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    a: CMatrix,
    z: Vec<C64>,
}

impl GroupElement {
    pub fn new(a: CMatrix, z: Vec<C64>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: z.len(),
                actual: a.nrows(),
            });
        }
        let defect = linalg::unitarity_defect(&a);
        if defect > UNITARY_TOL {
            return Err(Error::NonUnitary(defect));
        }
        Ok(GroupElement { a, z })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement {
            a: CMatrix::identity(n, n),
            z: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn translation(z: Vec<C64>) -> Self {
        GroupElement {
            a: CMatrix::identity(z.len(), z.len()),
            z,
        }
    }

    /// `diag(e^{iθ_j})`.
    pub fn rotation(angles: &[f64]) -> Self {
        let n = angles.len();
        let mut a = CMatrix::zeros(n, n);
        for (j, th) in angles.iter().enumerate() {
            a[(j, j)] = C64::from_polar(1.0, *th);
        }
        GroupElement {
            a,
            z: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn shift(&self) -> &[C64] {
        &self.z
    }

    pub fn is_translation(&self) -> bool {
        self.a == CMatrix::identity(self.n(), self.n())
    }

    pub fn is_linear(&self) -> bool {
        self.z.iter().all(|v| *v == C64::new(0.0, 0.0))
    }

    /// `g₁ g₂ = (A₁A₂, A₁z₂ + z₁)`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            a: &self.a * &other.a,
            z: self.act_point(&other.z),
        }
    }

    /// `(A^†, -A^† z)`.
    pub fn inverse(&self) -> GroupElement {
        let ai = self.a.adjoint();
        let z = -(&ai * linalg::CVector::from_column_slice(&self.z));
        GroupElement {
            a: ai,
            z: z.iter().copied().collect(),
        }
    }

    /// `A w + z`.
    pub fn act_point(&self, w: &[C64]) -> Vec<C64> {
        let v = &self.a * linalg::CVector::from_column_slice(w);
        v.iter().zip(&self.z).map(|(a, b)| a + b).collect()
    }

    /// Diagonal phases `arg A_jj`.
    pub fn angles(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.a[(j, j)].arg()).collect()
    }
}

pub fn act_point(g: &GroupElement, w: &[C64]) -> Vec<C64> {
    g.act_point(w)
}

/// `(g·a)(w) = a(g^{-1} w)`.
pub fn act_symbol(g: &GroupElement, a: &Symbol) -> Symbol {
    let inv = g.inverse();
    let inner = a.evaluator().clone();
    Symbol::from_fn(format!("g·{}", a.label()), SymbolKind::Composite, a.n(), move |w| {
        inner(&inv.act_point(w))
    })
    .with_radial(a.is_radial() && g.is_linear())
    .with_sup_bound(a.sup_bound())
    .with_integral(a.integral())
}

/// Kind of subgroup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SubgroupKind {
    Translations,
    Torus,
    FullUnitary,
    QuasiRadialBlocks { partition: Vec<usize> },
    FiniteSet,
}

/// A subgroup with a quadrature for its Haar measure.
#[derive(Clone)]
pub struct Subgroup {
    kind: SubgroupKind,
    n: usize,
    elements: Vec<GroupElement>,
    weights: Vec<f64>,
    angle_grid: usize,
    mc_samples: usize,
    seed: u64,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subgroup")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("haar_nodes", &self.elements.len())
            .field("angle_grid", &self.angle_grid)
            .field("mc_samples", &self.mc_samples)
            .field("seed", &self.seed)
            .finish()
    }
}

pub const DEFAULT_ANGLE_GRID: usize = 64;
pub const DEFAULT_MC_SAMPLES: usize = 4096;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Haar-distributed `U(m)` from the QR factorization of a complex Gaussian matrix.
pub fn haar_unitary<R: Rng>(m: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) / 2f64.sqrt()
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 { C64::new(1.0, 0.0) } else { d / d.norm() };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn block_diagonal(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut a = CMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let m = b.nrows();
        a.view_mut((off, off), (m, m)).copy_from(b);
        off += m;
    }
    a
}

impl Subgroup {
    /// `ℂⁿ` with Lebesgue measure discretized by `quad`.
    pub fn translations(quad: &ConvQuadrature) -> Self {
        Subgroup {
            kind: SubgroupKind::Translations,
            n: quad.n(),
            elements: quad.nodes().iter().map(|z| GroupElement::translation(z.clone())).collect(),
            weights: quad.weights().to_vec(),
            angle_grid: 0,
            mc_samples: 0,
            seed: 0,
        }
    }

    /// `𝕋ⁿ` with a uniform product angle grid.
    pub fn torus(n: usize, angle_grid: usize) -> Result<Self> {
        Subgroup::quasi_radial_blocks(vec![1; n], angle_grid, 0, 0).map(|mut g| {
            g.kind = SubgroupKind::Torus;
            g
        })
    }

    /// `U(n)` with Monte Carlo Haar samples.
    pub fn full_unitary(n: usize, mc_samples: usize, seed: u64) -> Result<Self> {
        Subgroup::quasi_radial_blocks(vec![n], 0, mc_samples, seed).map(|mut g| {
            g.kind = SubgroupKind::FullUnitary;
            g
        })
    }

    /// `U(n₁) × ⋯ × U(n_k)`: angle grids for size-one blocks, Haar samples otherwise.
    pub fn quasi_radial_blocks(partition: Vec<usize>, angle_grid: usize, mc_samples: usize, seed: u64) -> Result<Self> {
        let n: usize = partition.iter().sum();
        if partition.is_empty() || partition.contains(&0) {
            return Err(Error::InvalidPartition {
                partition: partition.clone(),
                n,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut factors: Vec<Vec<CMatrix>> = Vec::new();
        for &m in &partition {
            if m == 1 && angle_grid > 0 {
                factors.push(
                    (0..angle_grid)
                        .map(|k| CMatrix::from_element(1, 1, C64::from_polar(1.0, 2.0 * PI * k as f64 / angle_grid as f64)))
                        .collect(),
                );
            } else {
                if mc_samples == 0 {
                    return Err(Error::InvalidArgument(format!(
                        "block of size {m} needs an angle grid (size one) or Monte Carlo samples"
                    )));
                }
                factors.push((0..mc_samples).map(|_| haar_unitary(m, &mut rng)).collect());
            }
        }
        let total: usize = factors.iter().map(|f| f.len()).product();
        let mut elements = Vec::with_capacity(total);
        let mut idx = vec![0usize; factors.len()];
        for _ in 0..total {
            let blocks: Vec<CMatrix> = idx.iter().zip(&factors).map(|(i, f)| f[*i].clone()).collect();
            elements.push(GroupElement {
                a: block_diagonal(&blocks),
                z: vec![C64::new(0.0, 0.0); n],
            });
            for (slot, f) in idx.iter_mut().zip(&factors).rev() {
                *slot += 1;
                if *slot < f.len() {
                    break;
                }
                *slot = 0;
            }
        }
        let w = 1.0 / total as f64;
        Ok(Subgroup {
            kind: SubgroupKind::QuasiRadialBlocks { partition },
            n,
            weights: vec![w; total],
            elements,
            angle_grid,
            mc_samples,
            seed,
        })
    }

    pub fn finite_set(elements: Vec<GroupElement>, weights: Vec<f64>) -> Result<Self> {
        if elements.is_empty() || elements.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: elements.len(),
                actual: weights.len(),
            });
        }
        let n = elements[0].n();
        Ok(Subgroup {
            kind: SubgroupKind::FiniteSet,
            n,
            elements,
            weights,
            angle_grid: 0,
            mc_samples: 0,
            seed: 0,
        })
    }

    pub fn kind(&self) -> &SubgroupKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mc_samples(&self) -> usize {
        self.mc_samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self.kind, SubgroupKind::Translations)
    }

    /// Block sizes of the unitary part (`None` for translations and finite sets).
    pub fn partition(&self) -> Option<Vec<usize>> {
        match &self.kind {
            SubgroupKind::Torus => Some(vec![1; self.n]),
            SubgroupKind::FullUnitary => Some(vec![self.n]),
            SubgroupKind::QuasiRadialBlocks { partition } => Some(partition.clone()),
            _ => None,
        }
    }

    fn require_compact(&self, op: &str) -> Result<()> {
        if self.is_compact() {
            Ok(())
        } else {
            Err(Error::NonCompactGroup(format!("{op} needs a compact subgroup, got {:?}", self.kind)))
        }
    }

    /// Pseudo-random elements drawn with a fixed seed.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<GroupElement> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self.partition() {
            Some(partition) => (0..count)
                .map(|_| {
                    let blocks: Vec<CMatrix> = partition
                        .iter()
                        .map(|&m| {
                            if m == 1 {
                                let th: f64 = rng.random::<f64>() * 2.0 * PI;
                                CMatrix::from_element(1, 1, C64::from_polar(1.0, th))
                            } else {
                                haar_unitary(m, &mut rng)
                            }
                        })
                        .collect();
                    GroupElement {
                        a: block_diagonal(&blocks),
                        z: vec![C64::new(0.0, 0.0); self.n],
                    }
                })
                .collect(),
            None => match self.kind {
                SubgroupKind::Translations => (0..count)
                    .map(|_| {
                        GroupElement::translation(
                            (0..self.n)
                                .map(|_| C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
                                .collect(),
                        )
                    })
                    .collect(),
                _ => self.elements.clone(),
            },
        }
    }

    /// Rotations of one size-one block coordinate through every angle-grid step.
    pub fn generators(&self) -> Vec<GroupElement> {
        let Some(partition) = self.partition() else {
            return Vec::new();
        };
        if self.angle_grid == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut off = 0;
        for &m in &partition {
            if m == 1 {
                for k in 1..self.angle_grid {
                    let mut angles = vec![0.0; self.n];
                    angles[off] = 2.0 * PI * k as f64 / self.angle_grid as f64;
                    out.push(GroupElement::rotation(&angles));
                }
            }
            off += m;
        }
        out
    }
}

/// A density on a subgroup.
#[derive(Clone)]
pub struct GroupFunction {
    label: String,
    f: Arc<dyn Fn(&GroupElement) -> C64 + Send + Sync>,
}

impl fmt::Debug for GroupFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupFunction({})", self.label)
    }
}

impl GroupFunction {
    pub fn new<F: Fn(&GroupElement) -> C64 + Send + Sync + 'static>(label: impl Into<String>, f: F) -> Self {
        GroupFunction {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn constant(value: C64) -> Self {
        GroupFunction::new(format!("constant({value})"), move |_| value)
    }

    /// `Σ c_k e^{i⟨k, θ⟩}` in the diagonal phases `θ`.
    pub fn trigonometric(terms: Vec<(Vec<i32>, C64)>) -> Self {
        GroupFunction::new(format!("trigonometric({terms:?})"), move |g| {
            let th = g.angles();
            terms
                .iter()
                .map(|(k, c)| {
                    let phase: f64 = k.iter().zip(&th).map(|(a, b)| *a as f64 * b).sum();
                    c * C64::from_polar(1.0, phase)
                })
                .sum()
        })
    }

    /// `ψ(A, z) = a(z)`, for translation subgroups.
    pub fn from_symbol(a: &Symbol) -> Self {
        let inner = a.evaluator().clone();
        GroupFunction::new(a.label(), move |g| inner(g.shift()))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, g: &GroupElement) -> C64 {
        (self.f)(g)
    }

    /// `∫_G ψ dμ` under the subgroup's quadrature.
    pub fn integral(&self, group: &Subgroup) -> C64 {
        group.elements.iter().zip(&group.weights).map(|(g, w)| self.eval(g) * *w).sum()
    }

    /// `‖ψ‖₁` under the subgroup's quadrature.
    pub fn l1_norm(&self, group: &Subgroup) -> f64 {
        group.elements.iter().zip(&group.weights).map(|(g, w)| self.eval(g).norm() * w.abs()).sum()
    }
}

/// Matrix of `R_A`, block diagonal by total degree.
pub fn rotation_matrix(space: &TruncatedSpace, a: &CMatrix) -> Result<CMatrix> {
    let n = space.n();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: a.nrows(),
        });
    }
    let ainv = a.adjoint();
    let d = space.dim();
    let mut r = CMatrix::zeros(d, d);
    for (col, k) in space.indices().iter().enumerate() {
        // (A^{-1} w)^k expanded as a polynomial in w, stored by basis position.
        let mut poly: Vec<(Vec<usize>, C64)> = vec![(vec![0; n], C64::new(1.0, 0.0))];
        for (i, &ki) in k.0.iter().enumerate() {
            for _ in 0..ki {
                let mut next: Vec<(Vec<usize>, C64)> = Vec::new();
                for (m, c) in &poly {
                    for j in 0..n {
                        let coef = ainv[(i, j)];
                        if coef == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let mut m2 = m.clone();
                        m2[j] += 1;
                        match next.iter_mut().find(|(x, _)| *x == m2) {
                            Some(slot) => slot.1 += c * coef,
                            None => next.push((m2, c * coef)),
                        }
                    }
                }
                poly = next;
            }
        }
        let ck = space.coefficient(col);
        for (m, c) in poly {
            let row = space.position(&MultiIndex(m)).expect("degree preserved");
            r[(row, col)] = c * ck / space.coefficient(row);
        }
    }
    Ok(r)
}

/// `π(g) = W_z R_A`; Fock only unless `z = 0`.
pub fn proj_rep(space: &Arc<TruncatedSpace>, g: &GroupElement) -> Result<OperatorMatrix> {
    let r = rotation_matrix(space, &g.a)?;
    if g.is_linear() {
        return Ok(OperatorMatrix::from_parts(space.clone(), r));
    }
    let w = weyl(space, &g.z)?;
    let mut out = OperatorMatrix::from_parts(space.clone(), w.entries() * r);
    for warning in w.warnings() {
        out.push_warning(warning.clone());
    }
    Ok(out)
}

/// `π(g) S π(g)^†`.
pub fn translate_op_g(space: &Arc<TruncatedSpace>, g: &GroupElement, s: &OperatorMatrix) -> Result<OperatorMatrix> {
    let p = proj_rep(space, g)?;
    Ok(OperatorMatrix::from_parts(space.clone(), linalg::conjugate(p.entries(), s.entries())))
}

/// `(ψ ∗_G a)(z) = ∫_G a(g^{-1} z) ψ(g) dμ(g)`.
pub fn conv_g_symbol(psi: &GroupFunction, a: &Symbol, group: &Subgroup) -> Symbol {
    let terms: Vec<(GroupElement, C64)> = group
        .elements
        .iter()
        .zip(&group.weights)
        .map(|(g, w)| (g.inverse(), psi.eval(g) * *w))
        .filter(|(_, c)| *c != C64::new(0.0, 0.0))
        .collect();
    let l1: f64 = terms.iter().map(|(_, c)| c.norm()).sum();
    let inner = a.evaluator().clone();
    Symbol::from_fn(
        format!("{}∗_G({})", psi.label(), a.label()),
        SymbolKind::Composite,
        a.n(),
        move |z| terms.iter().map(|(gi, c)| inner(&gi.act_point(z)) * c).sum(),
    )
    .with_radial(a.is_radial() && group.is_compact())
    .with_sup_bound(a.sup_bound().map(|b| b * l1))
}

/// `ψ ∗_G S = ∫_G π(g) S π(g)^† ψ(g) dμ(g)`.
pub fn conv_g_op(psi: &GroupFunction, s: &OperatorMatrix, group: &Subgroup) -> Result<OperatorMatrix> {
    let space = s.space();
    let coeffs: Vec<C64> = group
        .elements
        .iter()
        .zip(&group.weights)
        .map(|(g, w)| psi.eval(g) * *w)
        .collect();
    haar_sum(space, s, &group.elements, &coeffs)
}

fn haar_sum(
    space: &Arc<TruncatedSpace>,
    s: &OperatorMatrix,
    elements: &[GroupElement],
    coeffs: &[C64],
) -> Result<OperatorMatrix> {
    if elements.iter().all(GroupElement::is_translation) {
        space.require_fock("translation average")?;
        let nodes: Vec<Vec<C64>> = elements.iter().map(|g| g.z.clone()).collect();
        let (m, _) = translation_sum(space, s.entries(), &nodes, coeffs);
        return Ok(OperatorMatrix::from_parts(space.clone(), m));
    }
    let d = space.dim();
    let work: Vec<(usize, usize)> = (0..elements.len())
        .step_by(CHUNK)
        .map(|a| (a, (a + CHUNK).min(elements.len())))
        .collect();
    let parts: Vec<Result<CMatrix>> = work
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = CMatrix::zeros(d, d);
            for i in lo..hi {
                if coeffs[i] == C64::new(0.0, 0.0) {
                    continue;
                }
                let p = proj_rep(space, &elements[i])?;
                acc += linalg::conjugate(p.entries(), s.entries()) * coeffs[i];
            }
            Ok(acc)
        })
        .collect();
    let mut out = CMatrix::zeros(d, d);
    for p in parts {
        out += p?;
    }
    Ok(OperatorMatrix::from_parts(space.clone(), out))
}

/// Multi-degree of index `k` per block of the partition.
fn block_degrees(k: &MultiIndex, partition: &[usize]) -> Vec<usize> {
    let mut off = 0;
    partition
        .iter()
        .map(|&m| {
            let d = k.0[off..off + m].iter().sum();
            off += m;
            d
        })
        .collect()
}

/// Haar average `∫_G π(A) S π(A)^† dμ(A)` over a compact subgroup.
///
/// For torus and block subgroups the average is the projection onto the
/// commutant, `Σ_d tr(P_d S)/dim(P_d) · P_d` over block multi-degrees `d`,
/// computed exactly. Other compact subgroups use their Haar quadrature.
pub fn radialize(s: &OperatorMatrix, group: &Subgroup) -> Result<OperatorMatrix> {
    group.require_compact("radialize")?;
    match group.partition() {
        Some(partition) => Ok(schur_projection(s, &partition)),
        None => radialize_by_quadrature(s, group),
    }
}

/// Haar average through the subgroup's quadrature, for any compact kind.
pub fn radialize_by_quadrature(s: &OperatorMatrix, group: &Subgroup) -> Result<OperatorMatrix> {
    group.require_compact("radialize")?;
    let coeffs: Vec<C64> = group.weights.iter().map(|w| C64::new(*w, 0.0)).collect();
    haar_sum(s.space(), s, &group.elements, &coeffs)
}

pub(crate) fn schur_projection(s: &OperatorMatrix, partition: &[usize]) -> OperatorMatrix {
    let space = s.space();
    let keys: Vec<Vec<usize>> = space.indices().iter().map(|k| block_degrees(k, partition)).collect();
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for (i, key) in keys.iter().enumerate() {
        match groups.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1.push(i),
            None => groups.push((key.clone(), vec![i])),
        }
    }
    let d = space.dim();
    let mut out = CMatrix::zeros(d, d);
    for (_, members) in groups {
        let tr: C64 = members.iter().map(|&i| s.entries()[(i, i)]).sum();
        let avg = tr / members.len() as f64;
        for &i in &members {
            out[(i, i)] = avg;
        }
    }
    OperatorMatrix::from_parts(space.clone(), out)
}

/// Result of an invariance test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub invariant: bool,
    /// `max_g ‖π̃(g)S − S‖ / (2‖S‖)` on the leading block.
    pub deviation: f64,
    pub samples: usize,
    pub tolerance: f64,
}

/// Samples `count` elements with `seed` plus the angle-grid generators and
/// measures the normalized deviation on the leading block (`size` overrides it).
pub fn is_invariant(
    s: &OperatorMatrix,
    group: &Subgroup,
    count: usize,
    seed: u64,
    tol: f64,
    size: Option<usize>,
) -> Result<InvarianceReport> {
    let space = s.space();
    let block = size.unwrap_or_else(|| space.leading_block());
    let mut elements = group.sample(count, seed);
    elements.extend(group.generators());
    let scale = linalg::op_norm(&s.block(block));
    let mut worst = 0.0_f64;
    for g in &elements {
        let moved = translate_op_g(space, g, s)?;
        worst = worst.max(linalg::op_norm(&(moved.block(block) - s.block(block))));
    }
    let deviation = if scale == 0.0 { 0.0 } else { worst / (2.0 * scale) };
    Ok(InvarianceReport {
        invariant: deviation <= tol,
        deviation,
        samples: elements.len(),
        tolerance: tol,
    })
}

/// `‖(ψ ∗_G S_k − ψ ∗_G S) e_j‖` per `k` (rows) and test vector `j` (columns).
pub fn sot_convergence_check(
    sequence: &[OperatorMatrix],
    s: &OperatorMatrix,
    psi: &GroupFunction,
    group: &Subgroup,
    tests: usize,
) -> Result<Vec<Vec<f64>>> {
    let base = conv_g_op(psi, s, group)?;
    sequence
        .iter()
        .map(|sk| {
            let diff = conv_g_op(psi, sk, group)?.sub(&base);
            Ok((0..tests.min(diff.dim())).map(|j| diff.entries().column(j).norm()).collect())
        })
        .collect()
}

/// Nodes on the unit sphere of `ℂ^m` with weights summing to one.
///
/// `|ζ_i|² = u_i` with `u` uniform on the simplex (conical Gauss–Jacobi) and
/// independent uniform phases.
pub fn sphere_rule(m: usize, radial: usize, angular: usize) -> Vec<(Vec<C64>, f64)> {
    let simplex = simplex_rule(m, radial);
    let mut out = Vec::with_capacity(simplex.len() * angular.pow(m as u32));
    let total = angular.pow(m as u32);
    for (u, wu) in simplex {
        for flat in 0..total {
            let mut rest = flat;
            let mut zeta = Vec::with_capacity(m);
            for &ui in &u {
                let k = rest % angular;
                rest /= angular;
                zeta.push(C64::from_polar(ui.sqrt(), 2.0 * PI * k as f64 / angular as f64));
            }
            out.push((zeta, wu / total as f64));
        }
    }
    out
}

/// Uniform measure on `{u ≥ 0, Σu = 1}` in `m` components.
fn simplex_rule(m: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
    if m == 1 {
        return vec![(vec![1.0], 1.0)];
    }
    let rule = unit_interval_jacobi(order, (m - 2) as f64);
    let norm: f64 = rule.weights.iter().sum();
    let inner = simplex_rule(m - 1, order);
    let mut out = Vec::new();
    for (u1, w1) in rule.nodes.iter().zip(&rule.weights) {
        for (rest, w2) in &inner {
            let mut u = vec![*u1];
            u.extend(rest.iter().map(|r| r * (1.0 - u1)));
            out.push((u, w1 / norm * w2));
        }
    }
    out
}

/// Symbol average over the block unitary group of `partition`.
///
/// Each block `z_i ∈ ℂ^{n_i}` is replaced by `|z_i| ζ` with `ζ` on the unit
/// sphere. `angular` phases per coordinate, `radial` simplex nodes per step.
pub fn radialize_symbol(a: &Symbol, partition: &[usize], radial: usize, angular: usize) -> Result<Symbol> {
    let n: usize = partition.iter().sum();
    if n != a.n() || partition.contains(&0) {
        return Err(Error::InvalidPartition {
            partition: partition.to_vec(),
            n: a.n(),
        });
    }
    let rules: Vec<Vec<(Vec<C64>, f64)>> = partition.iter().map(|&m| sphere_rule(m, radial, angular)).collect();
    let parts = partition.to_vec();
    let inner = a.evaluator().clone();
    let rules = Arc::new(rules);
    // The average depends on the block radii only.
    let cache: Mutex<HashMap<Vec<u64>, C64>> = Mutex::new(HashMap::new());
    Ok(Symbol::from_fn(format!("qrad({})", a.label()), SymbolKind::Composite, n, move |z| {
        let radii: Vec<f64> = {
            let mut off = 0;
            parts
                .iter()
                .map(|&m| {
                    let r = z[off..off + m].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                    off += m;
                    r
                })
                .collect()
        };
        let key: Vec<u64> = radii.iter().map(|r| r.to_bits()).collect();
        if let Some(v) = cache.lock().expect("cache lock").get(&key) {
            return *v;
        }
        let total: usize = rules.iter().map(|r| r.len()).product();
        let mut point = vec![C64::new(0.0, 0.0); n];
        let mut acc = C64::new(0.0, 0.0);
        for flat in 0..total {
            let mut rest = flat;
            let mut w = 1.0;
            let mut off = 0;
            for (b, rule) in rules.iter().enumerate() {
                let (zeta, wz) = &rule[rest % rule.len()];
                rest /= rule.len();
                w *= wz;
                for (j, v) in zeta.iter().enumerate() {
                    point[off + j] = v * radii[b];
                }
                off += parts[b];
            }
            acc += inner(&point) * w;
        }
        cache.lock().expect("cache lock").insert(key, acc);
        acc
    })
    .with_radial(partition.len() == 1)
    .with_sup_bound(a.sup_bound()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs};
    use crate::operators::{toeplitz, weyl};
    use crate::symbol::registry;

    fn fock(n: usize, deg: usize) -> Arc<TruncatedSpace> {
        TruncatedSpace::fock(n, deg).unwrap()
    }

    fn random_unitary(n: usize, seed: u64) -> CMatrix {
        haar_unitary(n, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn element_algebra() {
        let g1 = GroupElement::new(random_unitary(2, 1), vec![c(0.3, 0.1), c(-0.2, 0.5)]).unwrap();
        let g2 = GroupElement::new(random_unitary(2, 2), vec![c(1.0, 0.0), c(0.0, -0.4)]).unwrap();
        let w = vec![c(0.7, -0.2), c(0.1, 0.9)];
        let lhs = g1.act_point(&g2.act_point(&w));
        let rhs = g1.compose(&g2).act_point(&w);
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).norm() < 1e-14);
        }
        let back = g1.inverse().act_point(&g1.act_point(&w));
        assert!(back.iter().zip(&w).all(|(a, b)| (a - b).norm() < 1e-14));
        assert!(matches!(
            GroupElement::new(CMatrix::identity(1, 1) * c(2.0, 0.0), vec![c(0.0, 0.0)]),
            Err(Error::NonUnitary(_))
        ));
        let coord = Symbol::from_fn("w1", SymbolKind::Polynomial, 1, |z| z[0]);
        let moved = act_symbol(&GroupElement::translation(vec![c(0.5, 0.5)]), &coord);
        assert!((moved.eval(&[c(1.0, 0.0)]) - c(0.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn projective_representation() {
        let s = fock(1, 12);
        let id = proj_rep(&s, &GroupElement::identity(1)).unwrap();
        assert!(max_abs(&(id.entries() - CMatrix::identity(13, 13))) == 0.0);
        let th = 0.7;
        let r = proj_rep(&s, &GroupElement::rotation(&[th])).unwrap();
        for k in 0..13 {
            assert!((r.entries()[(k, k)] - C64::from_polar(1.0, -(k as f64) * th)).norm() < 1e-14);
        }
        let z = vec![c(0.3, -0.2)];
        let t = proj_rep(&s, &GroupElement::translation(z.clone())).unwrap();
        assert!(max_abs(&(t.entries() - weyl(&s, &z).unwrap().entries())) == 0.0);
    }

    #[test]
    fn rotation_matrix_is_unitary_and_multiplicative() {
        for space in [fock(2, 6), TruncatedSpace::bergman(2, 6).unwrap()] {
            let a = random_unitary(2, 7);
            let b = random_unitary(2, 8);
            let ra = rotation_matrix(&space, &a).unwrap();
            let rb = rotation_matrix(&space, &b).unwrap();
            let rab = rotation_matrix(&space, &(&a * &b)).unwrap();
            assert!(linalg::unitarity_defect(&ra) < 1e-12);
            assert!(max_abs(&(&ra * &rb - rab)) < 1e-12);
        }
    }

    #[test]
    fn rotation_moves_toeplitz_symbol() {
        let s = fock(2, 8);
        let a = registry(2)[1].clone();
        let g = GroupElement::new(random_unitary(2, 3), vec![c(0.0, 0.0); 2]).unwrap();
        let lhs = translate_op_g(&s, &g, &toeplitz(&s, &a).unwrap()).unwrap();
        let rhs = toeplitz(&s, &act_symbol(&g, &a)).unwrap();
        assert!(max_abs(&(lhs.leading() - rhs.leading())) < 1e-6);
    }

    #[test]
    fn radialize_examples() {
        let s = fock(1, 8);
        let torus = Subgroup::torus(1, 64).unwrap();
        let e01 = OperatorMatrix::matrix_unit(&s, 0, 1);
        assert_eq!(max_abs(radialize(&e01, &torus).unwrap().entries()), 0.0);
        let q = radialize_by_quadrature(&e01, &torus).unwrap();
        assert!(max_abs(q.entries()) < 1e-15);
        let report = is_invariant(&e01, &torus, 32, 1, 1e-8, None).unwrap();
        assert!(!report.invariant);
        assert!((report.deviation - 1.0).abs() < 1e-12);
        let diag = toeplitz(&s, &Symbol::phi(1)).unwrap();
        assert!(is_invariant(&diag, &torus, 32, 1, 1e-12, None).unwrap().invariant);
        assert!(matches!(
            radialize(&diag, &Subgroup::translations(&ConvQuadrature::uniform(1, 1.0, 3).unwrap())),
            Err(Error::NonCompactGroup(_))
        ));
    }

    #[test]
    fn schur_projection_matches_haar_average_for_unitary_blocks() {
        let s = fock(2, 4);
        let d = s.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = CMatrix::from_fn(d, d, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let x = OperatorMatrix::new(s.clone(), m).unwrap();
        let g = Subgroup::full_unitary(2, 4096, 5).unwrap();
        let exact = radialize(&x, &g).unwrap();
        let mc = radialize_by_quadrature(&x, &g).unwrap();
        // Monte Carlo error ~ 1/√4096.
        assert!(max_abs(&(exact.entries() - mc.entries())) < 0.05);
        let twice = radialize(&exact, &g).unwrap();
        assert!(max_abs(&(twice.entries() - exact.entries())) < 1e-15);
        assert!(exact.norm() <= x.norm() + 1e-10);
    }

    #[test]
    fn group_convolution_lemmas_on_torus() {
        let s = fock(1, 12);
        let torus = Subgroup::torus(1, 64).unwrap();
        let one = GroupFunction::constant(c(1.0, 0.0));
        let twice_re = Symbol::twice_real_part(1, 0);
        let avg = conv_g_symbol(&one, &twice_re, &torus);
        assert!(avg.eval(&[c(0.8, -0.3)]).norm() < 1e-14);
        let psi = GroupFunction::trigonometric(vec![(vec![0], c(1.0, 0.0)), (vec![1], c(0.3, 0.2))]);
        let a = registry(1)[1].clone();
        let lhs = conv_g_op(&psi, &toeplitz(&s, &a).unwrap(), &torus).unwrap();
        let rhs = toeplitz(&s, &conv_g_symbol(&psi, &a, &torus)).unwrap();
        assert!(max_abs(&(lhs.leading() - rhs.leading())) < 1e-6);
        let diag = toeplitz(&s, &Symbol::phi(1)).unwrap();
        let scaled = conv_g_op(&psi, &diag, &torus).unwrap();
        let expect = diag.scale(psi.integral(&torus));
        assert!(max_abs(&(scaled.entries() - expect.entries())) < 1e-8);
        let single = Subgroup::finite_set(vec![GroupElement::identity(1)], vec![1.0]).unwrap();
        assert_eq!(conv_g_op(&one, &diag, &single).unwrap().entries(), diag.entries());
    }

    #[test]
    fn sphere_rule_moments() {
        // E|ζ₁|² = 1/m and E|ζ₁|⁴ = 2/(m(m+1)) on the sphere of ℂ^m.
        for m in 1..=3 {
            let rule = sphere_rule(m, 8, 8);
            let total: f64 = rule.iter().map(|(_, w)| w).sum();
            let m2: f64 = rule.iter().map(|(z, w)| z[0].norm_sqr() * w).sum();
            let m4: f64 = rule.iter().map(|(z, w)| z[0].norm_sqr().powi(2) * w).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!((m2 - 1.0 / m as f64).abs() < 1e-12);
            assert!((m4 - 2.0 / (m * (m + 1)) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_and_symbol_radialization_commute_with_toeplitz() {
        let s = fock(1, 12);
        let a = registry(1)[1].clone();
        let torus = Subgroup::torus(1, 64).unwrap();
        let lhs = radialize(&toeplitz(&s, &a).unwrap(), &torus).unwrap();
        let rhs = toeplitz(&s, &radialize_symbol(&a, &[1], 1, 64).unwrap()).unwrap();
        assert!(max_abs(&(lhs.entries() - rhs.entries())) < 1e-8);
    }
}
