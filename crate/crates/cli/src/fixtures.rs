//! Deterministic inputs shared by the suites.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qhalab::linalg::{op_norm, CMatrix};
use qhalab::symbol::registry;
use qhalab::{phi_op, toeplitz, translate_op, OperatorMatrix, Symbol, TruncatedSpace, C64};

use crate::config::RunConfig;
use crate::error::CliError;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn random_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
}

/// Random matrix supported on the leading `block × block` corner.
pub fn random_operator<R: Rng>(space: &Arc<TruncatedSpace>, block: usize, rng: &mut R) -> OperatorMatrix {
    let d = space.dim();
    let b = block.min(d);
    let mut m = CMatrix::zeros(d, d);
    for j in 0..b {
        for k in 0..b {
            m[(j, k)] = random_c64(rng);
        }
    }
    OperatorMatrix::new(space.clone(), m).expect("dimensions agree")
}

/// Points of the ball `|z| ≤ radius`, including the origin and the sphere.
pub fn ball_points(n: usize, radius: f64) -> Vec<Vec<C64>> {
    let mut out = vec![vec![C64::new(0.0, 0.0); n]];
    for step in 1..=3 {
        let r = radius * step as f64 / 3.0;
        for a in 0..5 {
            let th = 2.0 * PI * a as f64 / 5.0 + 0.3;
            if n == 1 {
                out.push(vec![C64::from_polar(r, th)]);
            } else {
                for alpha in [0.35, 1.1] {
                    let mut z = vec![C64::new(0.0, 0.0); n];
                    z[0] = C64::from_polar(r * f64::cos(alpha), th);
                    z[1] = C64::from_polar(r * f64::sin(alpha), th + 1.1);
                    out.push(z);
                }
            }
        }
    }
    out
}

/// Registry symbols selected by the configuration.
pub fn symbols(cfg: &RunConfig, n: usize) -> Vec<Symbol> {
    registry(n)
        .into_iter()
        .filter(|a| cfg.symbols.registry.is_empty() || cfg.symbols.registry.iter().any(|s| s == a.label()))
        .collect()
}

/// Registry symbols that are not radial, for the group checks.
pub fn angular_symbols(cfg: &RunConfig, n: usize) -> Vec<Symbol> {
    symbols(cfg, n).into_iter().filter(|a| !a.is_radial()).collect()
}

/// The five test operators of the convolution identities.
pub fn test_operators(space: &Arc<TruncatedSpace>, seed: u64) -> Result<Vec<(String, OperatorMatrix)>, CliError> {
    let n = space.n();
    let phi = phi_op(space)?;
    let mut w0 = vec![C64::new(0.0, 0.0); n];
    w0[0] = C64::new(0.5, 0.3);
    let mut z0 = vec![C64::new(0.0, 0.0); n];
    z0[0] = C64::new(0.3, -0.2);
    Ok(vec![
        ("Phi".into(), phi.clone()),
        ("E01".into(), OperatorMatrix::matrix_unit(space, 0, 1)),
        ("random-block".into(), random_operator(space, 6, &mut rng(seed, 1))),
        ("toeplitz-plane-wave".into(), toeplitz(space, &Symbol::plane_wave(w0))?),
        ("translated-Phi".into(), translate_op(space, &z0, &phi)?),
    ])
}

/// The three operators of the strong-topology study.
pub fn sot_operators(space: &Arc<TruncatedSpace>) -> Result<Vec<(String, OperatorMatrix)>, CliError> {
    let mut w0 = vec![C64::new(0.0, 0.0); space.n()];
    w0[0] = C64::new(0.5, 0.3);
    Ok(vec![
        ("Phi".into(), phi_op(space)?),
        ("E01".into(), OperatorMatrix::matrix_unit(space, 0, 1)),
        ("toeplitz-plane-wave".into(), toeplitz(space, &Symbol::plane_wave(w0))?),
    ])
}

pub fn block_error(a: &OperatorMatrix, b: &OperatorMatrix, size: usize) -> f64 {
    op_norm(&(a.block(size) - b.block(size)))
}

/// `max |f − g|` over the points, evaluated in parallel.
pub fn sup_error<F, G>(points: &[Vec<C64>], f: F, g: G) -> f64
where
    F: Fn(&[C64]) -> C64 + Sync,
    G: Fn(&[C64]) -> C64 + Sync,
{
    points
        .par_iter()
        .map(|z| (f(z) - g(z)).norm())
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_stay_in_the_ball() {
        for n in [1, 2] {
            let pts = ball_points(n, 1.5);
            assert!(pts.iter().all(|z| qhalab::fock::norm_sqr(z).sqrt() <= 1.5 + 1e-12));
            assert!(pts.iter().any(|z| (qhalab::fock::norm_sqr(z).sqrt() - 1.5).abs() < 1e-12));
        }
    }

    #[test]
    fn random_inputs_are_reproducible() {
        let space = TruncatedSpace::fock(1, 8).unwrap();
        let a = random_operator(&space, 6, &mut rng(5, 1));
        let b = random_operator(&space, 6, &mut rng(5, 1));
        let c = random_operator(&space, 6, &mut rng(5, 2));
        assert_eq!(a.entries(), b.entries());
        assert_ne!(a.entries(), c.entries());
        assert_eq!(a.entries()[(7, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn selection_filters_the_registry() {
        let mut cfg = RunConfig::default();
        assert_eq!(symbols(&cfg, 1).len(), 5);
        cfg.symbols.registry = vec!["lorentzian".into()];
        let s = symbols(&cfg, 1);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].label(), "lorentzian");
    }
}
