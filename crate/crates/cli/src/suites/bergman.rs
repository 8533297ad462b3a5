use std::sync::Arc;

use qhalab::groups::radialize_symbol;
use qhalab::linalg::op_norm;
use qhalab::{density_contraction_check, quasi_radialize, toeplitz, Symbol, TruncatedSpace, C64};

use super::{Checker, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::fixtures::{random_c64, random_operator, rng, symbols};

const CANDIDATES: usize = 64;
const SAMPLES: usize = 64;
/// Simplex nodes of the symbol average; unused for blocks of size one.
const RADIAL_NODES: usize = 8;

struct Setting {
    tag: String,
    space: Arc<TruncatedSpace>,
    partition: Vec<usize>,
    /// Phases per coordinate of the symbol average.
    angular: usize,
}

fn settings(cfg: &RunConfig) -> Result<Vec<Setting>, CliError> {
    let partition_2d = match &cfg.subgroup.partition {
        Some(p) if p.iter().sum::<usize>() == 2 => p.clone(),
        _ => vec![1, 1],
    };
    let mut out = Vec::new();
    for (kind, name) in [(false, "fock"), (true, "bergman")] {
        let make = |n: usize, d: usize| {
            if kind {
                TruncatedSpace::bergman(n, d)
            } else {
                TruncatedSpace::fock(n, d)
            }
        };
        out.push(Setting {
            tag: format!("{name}.n1"),
            space: make(1, cfg.space.degree)?,
            partition: vec![1],
            angular: cfg.subgroup.angle_grid,
        });
        out.push(Setting {
            tag: format!("{name}.n2"),
            space: make(2, cfg.space.degree_2d)?,
            partition: partition_2d.clone(),
            angular: cfg.subgroup.angle_grid_2d,
        });
    }
    Ok(out)
}

/// Shifted Gaussians with random amplitude, width and center.
fn candidates(n: usize, seed: u64) -> Vec<Symbol> {
    let mut r = rng(seed, 90);
    (0..CANDIDATES)
        .map(|i| {
            let amp = random_c64(&mut r);
            let s = 0.5 + 1.5 * rand::Rng::random::<f64>(&mut r);
            let center: Vec<C64> = (0..n).map(|_| random_c64(&mut r) * 0.6).collect();
            Symbol::gaussian_general(amp, s, center).with_label(format!("candidate-{i}"))
        })
        .collect()
}

pub(super) fn run(c: &mut Checker) {
    let cfg = c.cfg;
    let all = match settings(cfg) {
        Ok(s) => s,
        Err(e) => {
            c.check("bergman.setup", "truncated spaces", Some(7), 0.0, || Err(e));
            return;
        }
    };
    for s in &all {
        suite(c, s);
    }
}

fn suite(c: &mut Checker, s: &Setting) {
    let cfg = c.cfg;
    let Setting {
        tag,
        space,
        partition,
        angular,
    } = s;
    let id = |name: &str| format!("bergman.{tag}.{name}");

    c.check(&id("idempotence"), "QRad(QRad S) = QRad S", Some(7), 1e-12, || {
        let x = random_operator(space, space.dim(), &mut rng(cfg.seed, 100));
        let q = quasi_radialize(&x, partition)?;
        let qq = quasi_radialize(&q, partition)?;
        Ok(Outcome::value(op_norm(&(qq.entries() - q.entries()))))
    });

    c.check(&id("contraction"), "||QRad S|| <= ||S||", Some(7), 1e-10, || {
        let mut r = rng(cfg.seed, 101);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..SAMPLES {
            let x = random_operator(space, space.dim(), &mut r);
            worst = worst.max(quasi_radialize(&x, partition)?.norm() - x.norm());
        }
        Ok(Outcome::value(worst))
    });

    c.check(&id("toeplitz"), "QRad(T_a) = T_{QRad a}", Some(7), 1e-8, || {
        let mut worst = 0.0_f64;
        for a in symbols(cfg, space.n()) {
            let lhs = quasi_radialize(&toeplitz(space, &a)?, partition)?;
            let rhs = toeplitz(space, &radialize_symbol(&a, partition, RADIAL_NODES, *angular)?)?;
            worst = worst.max(op_norm(&(lhs.entries() - rhs.entries())));
        }
        Ok(Outcome::value(worst))
    });

    c.check(&id("density"), "||S - T_{QRad a}|| <= ||S - T_a||", Some(7), 1e-8, || {
        let base = symbols(cfg, space.n()).into_iter().next().unwrap_or_else(|| Symbol::phi(space.n()));
        let target = quasi_radialize(&toeplitz(space, &base)?, partition)?;
        let report = density_contraction_check(&target, &candidates(space.n(), cfg.seed), partition, *angular, RADIAL_NODES)?;
        let worst = report
            .rows
            .iter()
            .map(|r| r.quasi_radial - r.general)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Outcome::value(worst).note(format!("{} candidates", report.rows.len())))
    });
}
