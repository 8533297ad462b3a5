use std::f64::consts::PI;
use std::sync::Arc;

use qhalab::fock::norm_sqr;
use qhalab::wiener::REGULARITY_THRESHOLD;
use qhalab::{
    berezin, conv_fo, conv_ff_with, conv_oo, conv_symbol_op, is_regular_function, phi_op, toeplitz,
    ConvQuadrature, OperatorMatrix, SpectralFunction, SpectralGrid, Symbol, TruncatedSpace, C64,
};

use super::{Checker, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::fixtures::{ball_points, block_error, random_operator, rng, symbols, sup_error, test_operators};

const ASSOCIATIVITY_HEADROOM: usize = 16;

pub(crate) const SYMBOL_OP_ANCHOR: &str = "T_a = a * Phi";
pub(crate) const PHI_PHI_ANCHOR: &str = "Phi * Phi = phi";
pub(crate) const BEREZIN_ANCHOR: &str = "Phi * S = B(S)";
pub(crate) const PHI_OP_ANCHOR: &str = "(Phi * S) * Phi = T_{B(S)}";

/// Block size of the Toeplitz-as-convolution comparison.
const SYMBOL_OP_BLOCK: usize = 8;

fn symbol_op_error(space: &Arc<TruncatedSpace>, a: &Symbol) -> Result<f64, CliError> {
    let phi = phi_op(space)?;
    let lhs = conv_symbol_op(a, &phi)?;
    let rhs = toeplitz(space, a)?;
    Ok(block_error(&lhs, &rhs, SYMBOL_OP_BLOCK))
}

fn phi_phi_error(space: &Arc<TruncatedSpace>) -> Result<f64, CliError> {
    let phi = phi_op(space)?;
    let c = conv_oo(&phi, &phi)?;
    Ok(sup_error(&ball_points(space.n(), 1.5), |z| c.eval(z), |z| {
        C64::new((-PI * norm_sqr(z)).exp(), 0.0)
    }))
}

fn berezin_error(space: &Arc<TruncatedSpace>, s: &OperatorMatrix) -> Result<f64, CliError> {
    let c = conv_oo(&phi_op(space)?, s)?;
    let b = berezin(space, s)?;
    Ok(sup_error(&ball_points(space.n(), 1.5), |z| c.eval(z), |z| b.eval(z)))
}

fn phi_op_error(space: &Arc<TruncatedSpace>, s: &OperatorMatrix) -> Result<f64, CliError> {
    let lhs = conv_fo(&Symbol::phi(space.n()), s)?;
    let rhs = toeplitz(space, &berezin(space, s)?.to_symbol())?;
    Ok(block_error(&lhs, &rhs, space.leading_block()))
}

/// Errors of the convolution identities at one truncation degree, in a fixed order.
pub fn truncation_errors(cfg: &RunConfig, degree: usize) -> Result<Vec<(String, f64)>, CliError> {
    let n = cfg.space.n;
    let space = TruncatedSpace::fock(n, degree)?;
    let mut out = Vec::new();
    for a in symbols(cfg, n) {
        out.push((format!("symbol_op.{}", a.label()), symbol_op_error(&space, &a)?));
    }
    out.push(("phi_phi".into(), phi_phi_error(&space)?));
    for (name, s) in test_operators(&space, cfg.seed)? {
        out.push((format!("berezin.{name}"), berezin_error(&space, &s)?));
        out.push((format!("phi_op.{name}"), phi_op_error(&space, &s)?));
    }
    Ok(out)
}

pub(super) fn run(c: &mut Checker) {
    let cfg = c.cfg;
    let n = cfg.space.n;
    let space = match TruncatedSpace::fock(n, cfg.space.degree) {
        Ok(s) => s,
        Err(e) => {
            c.check("conv.space", "F^2 truncation", None, 0.0, || Err(e.into()));
            return;
        }
    };

    for a in symbols(cfg, n) {
        c.check(&format!("conv.symbol_op.{}", a.label()), SYMBOL_OP_ANCHOR, Some(2), 1e-6, || {
            Ok(Outcome::value(symbol_op_error(&space, &a)?))
        });
    }

    c.check("conv.phi_phi", PHI_PHI_ANCHOR, Some(3), 1e-6, || Ok(Outcome::value(phi_phi_error(&space)?)));

    let ops = match test_operators(&space, cfg.seed) {
        Ok(ops) => ops,
        Err(e) => {
            c.check("conv.test_operators", "test operators", Some(3), 0.0, || Err(e));
            return;
        }
    };
    for (name, s) in &ops {
        c.check(&format!("conv.berezin.{name}"), BEREZIN_ANCHOR, Some(3), 1e-8, || {
            Ok(Outcome::value(berezin_error(&space, s)?))
        });
    }
    for (name, s) in &ops {
        c.check(&format!("conv.phi_op.{name}"), PHI_OP_ANCHOR, Some(3), 1e-5, || {
            Ok(Outcome::value(phi_op_error(&space, s)?))
        });
    }

    // phi * g_t = g_{sqrt(1 + t^2)} for the normalized dilated Gaussians g_t.
    let t = 0.75_f64;
    let merged = (1.0 + t * t).sqrt();
    c.check("conv.ff.gaussian", "phi * g_t = g_{sqrt(1+t^2)}", None, 1e-8, || {
        let h = conv_ff_with(
            &Symbol::phi(n),
            &Symbol::dilated_gaussian(n, t),
            &ConvQuadrature::gauss_hermite(n, 1.0, &vec![C64::new(0.0, 0.0); n], 32),
        )?;
        let exact = Symbol::dilated_gaussian(n, merged);
        Ok(Outcome::value(sup_error(&ball_points(n, 1.5), |z| h.eval(z), |z| exact.eval(z))))
    });

    c.check("conv.associativity", "psi1 * (psi2 * S) = (psi1 * psi2) * S", None, 1e-8, || {
        // The inner convolution fills the whole truncated space; the outer one
        // then needs headroom above the leading block.
        let wide = TruncatedSpace::fock(n, space.degree() + ASSOCIATIVITY_HEADROOM)?;
        let s = random_operator(&wide, 6, &mut rng(cfg.seed, 20));
        let lhs = conv_fo(&Symbol::phi(n), &conv_fo(&Symbol::dilated_gaussian(n, t), &s)?)?;
        let rhs = conv_fo(&Symbol::dilated_gaussian(n, merged), &s)?;
        Ok(Outcome::value(block_error(&lhs, &rhs, space.leading_block())))
    });

    c.check("conv.norm_bound", "||psi * S|| <= ||psi||_1 ||S||", None, 1e-10, || {
        let s = random_operator(&space, space.dim(), &mut rng(cfg.seed, 21));
        let out = conv_fo(&Symbol::phi(n), &s)?;
        Ok(Outcome::value(out.norm() - s.norm()))
    });

    c.check("conv.regular.phi", "phi^ has no zeros", None, 0.0, || {
        let grid = SpectralGrid::new(1, cfg.grid.radius, cfg.grid.points)?;
        let r = is_regular_function(&SpectralFunction::phi(1), &grid, REGULARITY_THRESHOLD);
        Ok(Outcome::value(if r.regular { 0.0 } else { 1.0 })
            .note(format!("min |phi^| = {:.3e} (log10 {:.2})", r.min_abs, r.log10_min_abs)))
    });
}
