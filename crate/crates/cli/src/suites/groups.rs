use std::sync::Arc;

use qhalab::groups::radialize_by_quadrature;
use qhalab::linalg::{max_abs, op_norm};
use qhalab::{
    act_symbol, conv_ff_with, conv_fo, conv_g_op, conv_g_symbol, conv_oo, conv_symbol_op, is_invariant, phi_op,
    proj_rep, radialize, toeplitz, translate_op_g, ConvQuadrature, GroupFunction, Subgroup, Symbol, TruncatedSpace,
    C64,
};

use super::{Checker, Outcome};
use crate::config::{RunConfig, SubgroupKindName};
use crate::error::CliError;
use crate::fixtures::{angular_symbols, ball_points, block_error, random_operator, rng, sup_error};

const TOL: f64 = 1e-5;
const INSTANCES: usize = 10;
const INJECTIVITY_BLOCK: usize = 6;

struct Setting {
    tag: &'static str,
    space: Arc<TruncatedSpace>,
    group: Subgroup,
    psi: GroupFunction,
    /// Gauss–Hermite order per axis for function convolutions.
    ff_order: usize,
}

fn settings(cfg: &RunConfig) -> Result<Vec<Setting>, CliError> {
    let sg = &cfg.subgroup;
    Ok(vec![
        Setting {
            tag: "torus1",
            space: TruncatedSpace::fock(1, cfg.space.degree)?,
            group: Subgroup::torus(1, sg.angle_grid)?,
            psi: GroupFunction::trigonometric(vec![
                (vec![0], C64::new(1.0, 0.0)),
                (vec![1], C64::new(0.3, 0.0)),
                (vec![-2], C64::new(0.0, 0.2)),
            ]),
            ff_order: 24,
        },
        Setting {
            tag: "qrb11",
            space: TruncatedSpace::fock(2, cfg.space.degree_2d)?,
            group: Subgroup::quasi_radial_blocks(vec![1, 1], sg.angle_grid_2d, sg.mc_samples, cfg.group_seed())?,
            psi: GroupFunction::trigonometric(vec![
                (vec![0, 0], C64::new(1.0, 0.0)),
                (vec![1, 0], C64::new(0.3, 0.0)),
                (vec![0, -1], C64::new(0.2, 0.0)),
                (vec![1, 1], C64::new(0.0, 0.1)),
            ]),
            ff_order: 10,
        },
    ])
}

/// The subgroup named by the configuration, on a matching space.
fn configured(cfg: &RunConfig) -> Result<(Arc<TruncatedSpace>, Subgroup), CliError> {
    let sg = &cfg.subgroup;
    let (n, group) = match sg.kind {
        SubgroupKindName::Torus => (cfg.space.n, Subgroup::torus(cfg.space.n, sg.angle_grid)?),
        SubgroupKindName::FullUnitary => (
            cfg.space.n,
            Subgroup::full_unitary(cfg.space.n, sg.mc_samples, cfg.group_seed())?,
        ),
        SubgroupKindName::QuasiRadialBlocks => {
            let p = sg.partition.clone().unwrap_or_else(|| vec![1; cfg.space.n]);
            let n = p.iter().sum();
            (n, Subgroup::quasi_radial_blocks(p, sg.angle_grid, sg.mc_samples, cfg.group_seed())?)
        }
    };
    let degree = if n == 1 { cfg.space.degree } else { cfg.space.degree_2d };
    Ok((TruncatedSpace::fock(n, degree)?, group))
}

pub(super) fn run(c: &mut Checker) {
    let cfg = c.cfg;
    let all = match settings(cfg) {
        Ok(s) => s,
        Err(e) => {
            c.check("groups.setup", "subgroups of U_n x C^n", Some(4), 0.0, || Err(e));
            return;
        }
    };
    for s in &all {
        lemma_suite(c, s);
    }
    match configured(cfg) {
        Ok((space, group)) => structural(c, "configured", &space, &group),
        Err(e) => c.check("groups.configured.setup", "configured subgroup", None, 0.0, || Err(e)),
    }
}

fn lemma_suite(c: &mut Checker, s: &Setting) {
    let cfg = c.cfg;
    let Setting {
        tag,
        space,
        group,
        psi,
        ff_order,
    } = s;
    let n = space.n();
    let block = space.leading_block();
    let symbols = angular_symbols(cfg, n);
    let seed = cfg.group_seed();
    let id = |name: &str| format!("groups.{tag}.{name}");

    c.check(&id("covariance"), "alpha_g T_a = T_{g.a}", Some(4), TOL, || {
        let mut worst = 0.0_f64;
        let mut elements = group.sample(3, seed);
        elements.extend(group.generators().into_iter().take(2));
        for a in &symbols {
            let ta = toeplitz(space, a)?;
            for g in &elements {
                let lhs = translate_op_g(space, g, &ta)?;
                let rhs = toeplitz(space, &act_symbol(g, a))?;
                worst = worst.max(block_error(&lhs, &rhs, block));
            }
        }
        Ok(Outcome::value(worst))
    });

    c.check(&id("toeplitz_conv"), "psi *_G T_a = T_{psi *_G a}", Some(4), TOL, || {
        let mut worst = 0.0_f64;
        for a in &symbols {
            let lhs = conv_g_op(psi, &toeplitz(space, a)?, group)?;
            let rhs = toeplitz(space, &conv_g_symbol(psi, a, group))?;
            worst = worst.max(block_error(&lhs, &rhs, block));
        }
        Ok(Outcome::value(worst))
    });

    // Radial function h, radial operator H = Phi, one angular symbol a.
    let h = Symbol::dilated_gaussian(n, 0.8);
    let zero = vec![C64::new(0.0, 0.0); n];
    let ff_quad = ConvQuadrature::gauss_hermite(n, 1.0 / 0.64, &zero, *ff_order);
    let a = symbols.first().cloned().unwrap_or_else(|| Symbol::phi(n));
    let points: Vec<Vec<C64>> = ball_points(n, 1.5).into_iter().step_by(if n == 1 { 1 } else { 2 }).collect();

    c.check(&id("radial.function_function"), "psi *_G (h * a) = h * (psi *_G a)", Some(4), TOL, || {
        let lhs = conv_g_symbol(psi, &conv_ff_with(&h, &a, &ff_quad)?, group);
        let rhs = conv_ff_with(&h, &conv_g_symbol(psi, &a, group), &ff_quad)?;
        Ok(Outcome::value(sup_error(&points, |z| lhs.eval(z), |z| rhs.eval(z))))
    });

    c.check(&id("radial.function_operator"), "psi *_G (h * S) = h * (psi *_G S)", Some(4), TOL, || {
        let ta = toeplitz(space, &a)?;
        let lhs = conv_g_op(psi, &conv_fo(&h, &ta)?, group)?;
        let rhs = conv_fo(&h, &conv_g_op(psi, &ta, group)?)?;
        Ok(Outcome::value(block_error(&lhs, &rhs, block)))
    });

    c.check(&id("radial.operator_function"), "psi *_G (H * a) = H * (psi *_G a)", Some(4), TOL, || {
        let phi = phi_op(space)?;
        let lhs = conv_g_op(psi, &conv_symbol_op(&a, &phi)?, group)?;
        let rhs = conv_symbol_op(&conv_g_symbol(psi, &a, group), &phi)?;
        Ok(Outcome::value(block_error(&lhs, &rhs, block)))
    });

    c.check(&id("radial.operator_operator"), "psi *_G (H * S) = H * (psi *_G S)", Some(4), TOL, || {
        let phi = phi_op(space)?;
        let ta = toeplitz(space, &a)?;
        let lhs = conv_g_symbol(psi, &conv_oo(&phi, &ta)?.to_symbol(), group);
        let rhs = conv_oo(&phi, &conv_g_op(psi, &ta, group)?)?;
        Ok(Outcome::value(sup_error(&points, |z| lhs.eval(z), |z| rhs.eval(z))))
    });

    c.check(&id("invariance_criterion"), "psi *_G S = (int psi) S for invariant S", Some(4), TOL, || {
        let total = psi.integral(group);
        let mut worst = 0.0_f64;
        for i in 0..3 {
            let x = random_operator(space, space.dim(), &mut rng(cfg.seed, 40 + i));
            let s = radialize(&x, group)?;
            let lhs = conv_g_op(psi, &s, group)?;
            worst = worst.max(block_error(&lhs, &s.scale(total), block));
        }
        Ok(Outcome::value(worst))
    });

    c.check(&id("injectivity"), "S invariant <=> phi * S invariant", Some(4), 0.0, || {
        let phi = Symbol::phi(n);
        let mut mismatches = 0usize;
        let mut notes = Vec::new();
        for i in 0..INSTANCES {
            let x = random_operator(space, INJECTIVITY_BLOCK, &mut rng(cfg.seed, 60 + i as u64));
            let s = if i < INSTANCES / 2 { radialize(&x, group)? } else { x };
            let before = is_invariant(&s, group, 8, seed, TOL, Some(INJECTIVITY_BLOCK))?;
            let after = is_invariant(&conv_fo(&phi, &s)?, group, 8, seed, TOL, Some(INJECTIVITY_BLOCK))?;
            if before.invariant != after.invariant {
                mismatches += 1;
            }
            notes.push(format!("{:.1e}/{:.1e}", before.deviation, after.deviation));
        }
        Ok(Outcome::value(mismatches as f64).note(format!("deviations S/phi*S: {}", notes.join(" "))))
    });

    structural(c, tag, space, group);
}

/// Projection and representation checks that hold for any compact subgroup.
fn structural(c: &mut Checker, tag: &str, space: &Arc<TruncatedSpace>, group: &Subgroup) {
    let cfg = c.cfg;
    let id = |name: &str| format!("groups.{tag}.{name}");

    c.check(&id("projection"), "Rad(Rad S) = Rad S", None, 1e-12, || {
        let x = random_operator(space, space.dim(), &mut rng(cfg.seed, 80));
        let r = radialize(&x, group)?;
        let rr = radialize(&r, group)?;
        Ok(Outcome::value(max_abs(&(rr.entries() - r.entries()))))
    });

    if group.partition().is_some_and(|p| p.iter().all(|&m| m == 1)) {
        c.check(&id("projection_quadrature"), "Rad S = int pi(g) S pi(g)^* dg", None, 1e-10, || {
            let x = random_operator(space, space.dim(), &mut rng(cfg.seed, 81));
            let fast = radialize(&x, group)?;
            let slow = radialize_by_quadrature(&x, group)?;
            Ok(Outcome::value(max_abs(&(fast.entries() - slow.entries()))))
        });
    }

    c.check(&id("representation"), "pi(g) pi(h) = pi(gh)", None, 1e-12, || {
        let els = group.sample(4, cfg.group_seed());
        let mut worst = 0.0_f64;
        for g in &els {
            for h in &els {
                let lhs = proj_rep(space, g)?.compose(&proj_rep(space, h)?);
                let rhs = proj_rep(space, &g.compose(h))?;
                worst = worst.max(op_norm(&(lhs.entries() - rhs.entries())));
            }
        }
        Ok(Outcome::value(worst))
    });
}
