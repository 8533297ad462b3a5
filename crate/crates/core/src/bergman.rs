//! Toeplitz operators on the truncated Bergman space of the ball and the
//! quasi-radial density check.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::TruncatedSpace;
use crate::groups::{is_invariant, radialize_symbol, schur_projection, Subgroup, DEFAULT_ANGLE_GRID, DEFAULT_SEED};
use crate::operators::{toeplitz, OperatorMatrix};
use crate::symbol::Symbol;

/// Invariance tolerance a density target must meet.
pub const TARGET_TOL: f64 = 1e-8;

/// `T_a` on `A²(Bⁿ)`; the symbol must be finite on every ball node.
pub fn bergman_toeplitz(space: &Arc<TruncatedSpace>, a: &Symbol) -> Result<OperatorMatrix> {
    if space.is_fock() {
        return Err(Error::RequiresBergman("bergman_toeplitz"));
    }
    toeplitz(space, a)
}

fn check_partition(space: &TruncatedSpace, partition: &[usize]) -> Result<()> {
    if partition.is_empty() || partition.contains(&0) || partition.iter().sum::<usize>() != space.n() {
        return Err(Error::InvalidPartition {
            partition: partition.to_vec(),
            n: space.n(),
        });
    }
    Ok(())
}

/// Average over `U(n₁) × ⋯ × U(n_k)`, exact at truncation.
///
/// Entries between different block multi-degrees vanish; each block
/// multi-degree subspace is replaced by its normalized trace.
pub fn quasi_radialize(s: &OperatorMatrix, partition: &[usize]) -> Result<OperatorMatrix> {
    check_partition(s.space(), partition)?;
    Ok(schur_projection(s, partition))
}

/// Block subgroup used to test quasi-radiality.
pub fn block_group(partition: &[usize]) -> Result<Subgroup> {
    Subgroup::quasi_radial_blocks(partition.to_vec(), DEFAULT_ANGLE_GRID, 256, DEFAULT_SEED)
}

/// One candidate of the density check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub label: String,
    /// `‖S − T_a‖`.
    pub general: f64,
    /// `‖S − T_{QRad a}‖`.
    pub quasi_radial: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub target_deviation: f64,
    pub rows: Vec<DensityRow>,
    pub tolerance: f64,
}

impl DensityReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Checks `‖S − T_{QRad a}‖ ≤ ‖S − T_a‖ + 1e-8` for each candidate.
///
/// `angular` phases per coordinate and `radial` simplex nodes define the
/// symbol average.
pub fn density_contraction_check(
    target: &OperatorMatrix,
    candidates: &[Symbol],
    partition: &[usize],
    angular: usize,
    radial: usize,
) -> Result<DensityReport> {
    let space = target.space();
    check_partition(space, partition)?;
    let group = block_group(partition)?;
    let inv = is_invariant(target, &group, 32, DEFAULT_SEED, TARGET_TOL, Some(space.dim()))?;
    if !inv.invariant {
        return Err(Error::NotQuasiRadial(inv.deviation));
    }
    let tolerance = 1e-8;
    let rows = candidates
        .iter()
        .map(|a| {
            let ta = toeplitz(space, a)?;
            let tq = toeplitz(space, &radialize_symbol(a, partition, radial, angular)?)?;
            let general = target.sub(&ta).norm();
            let quasi_radial = target.sub(&tq).norm();
            Ok(DensityRow {
                label: a.label().to_string(),
                general,
                quasi_radial,
                holds: quasi_radial <= general + tolerance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityReport {
        target_deviation: inv.deviation,
        rows,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::radialize;
    use crate::linalg::{c, max_abs, CMatrix};
    use crate::symbol::{registry, SymbolKind};

    #[test]
    fn toeplitz_examples() {
        let s = TruncatedSpace::bergman(1, 12).unwrap();
        let one = bergman_toeplitz(&s, &Symbol::constant(1, c(1.0, 0.0))).unwrap();
        assert!(max_abs(&(one.entries() - CMatrix::identity(13, 13))) < 1e-12);
        let m = bergman_toeplitz(&s, &Symbol::modulus_squared(1)).unwrap();
        for k in 0..13 {
            assert!((m.entries()[(k, k)].re - (k as f64 + 1.0) / (k as f64 + 2.0)).abs() < 1e-12);
        }
        let off: f64 = (0..13)
            .flat_map(|j| (0..13).filter(move |k| *k != j).map(move |k| (j, k)))
            .map(|(j, k)| m.entries()[(j, k)].norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-14);
        let fock = TruncatedSpace::fock(1, 4).unwrap();
        assert!(matches!(bergman_toeplitz(&fock, &Symbol::phi(1)), Err(Error::RequiresBergman(_))));
        let pole = Symbol::from_fn("pole", SymbolKind::Composite, 1, |z| c(1.0, 0.0) / (z[0] - z[0]));
        assert!(bergman_toeplitz(&s, &pole).is_err());
    }

    #[test]
    fn quasi_radialization_on_the_ball() {
        let s = TruncatedSpace::bergman(2, 6).unwrap();
        let a = registry(2)[1].clone();
        let ta = bergman_toeplitz(&s, &a).unwrap();
        let q = quasi_radialize(&ta, &[1, 1]).unwrap();
        let qq = quasi_radialize(&q, &[1, 1]).unwrap();
        assert!(max_abs(&(q.entries() - qq.entries())) < 1e-12);
        let tq = bergman_toeplitz(&s, &radialize_symbol(&a, &[1, 1], 1, 64).unwrap()).unwrap();
        assert!(max_abs(&(q.entries() - tq.entries())) < 1e-8);
        assert!(quasi_radialize(&ta, &[1]).is_err());
        let fock = TruncatedSpace::fock(2, 6).unwrap();
        let tf = toeplitz(&fock, &a).unwrap();
        let g = Subgroup::quasi_radial_blocks(vec![1, 1], 16, 0, 0).unwrap();
        assert!(max_abs(&(quasi_radialize(&tf, &[1, 1]).unwrap().entries() - radialize(&tf, &g).unwrap().entries())) < 1e-12);
    }

    #[test]
    fn density_examples() {
        let s = TruncatedSpace::bergman(1, 10).unwrap();
        let b = Symbol::modulus_squared(1);
        let tb = bergman_toeplitz(&s, &b).unwrap();
        let r = density_contraction_check(&tb, std::slice::from_ref(&b), &[1], 64, 1).unwrap();
        assert!(r.rows[0].general < 1e-12 && r.rows[0].quasi_radial < 1e-12);
        let a = registry(1)[1].clone();
        let target = quasi_radialize(&bergman_toeplitz(&s, &a).unwrap(), &[1]).unwrap();
        let r = density_contraction_check(&target, std::slice::from_ref(&a), &[1], 64, 1).unwrap();
        assert!(r.rows[0].quasi_radial < 1e-10);
        assert!(r.rows[0].general > 1e-3);
        let e01 = OperatorMatrix::matrix_unit(&s, 0, 1);
        assert!(matches!(
            density_contraction_check(&e01, &[a], &[1], 64, 1),
            Err(Error::NotQuasiRadial(_))
        ));
    }
}
