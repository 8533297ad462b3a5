use qhalab::linalg::{max_abs, CMatrix, CVector};
use qhalab::{
    berezin, kernel, parity, phi_op, toeplitz, weyl, OperatorMatrix, SpaceKind, Symbol, SymbolKind, TruncatedSpace, C64,
};
use qhalab::operators::weyl_by_quadrature;

use super::{Checker, Outcome};
use crate::fixtures::{ball_points, random_c64, rng, symbols, sup_error};

fn conj_symbol(a: &Symbol) -> Symbol {
    let f = a.evaluator().clone();
    Symbol::from_fn(format!("conj({})", a.label()), SymbolKind::Composite, a.n(), move |z| f(z).conj())
}

pub(super) fn run(c: &mut Checker) {
    let cfg = c.cfg;
    let n = cfg.space.n;
    let deg = cfg.space.degree;
    let order = cfg.space.quadrature_order;
    let kind: SpaceKind = cfg.space.kind.into();
    let space_for = |k: SpaceKind| {
        let ord = order.map(|o| (o, (2 * o).max(2 * deg + 8)));
        TruncatedSpace::new(k, n, deg, ord)
    };

    for (k, name) in [(SpaceKind::Fock, "fock"), (SpaceKind::Bergman, "bergman")] {
        c.check(&format!("core.gram.{name}"), "<e_j, e_k> = delta_jk", Some(1), 1e-10, || {
            Ok(Outcome::value(space_for(k)?.gram_deviation()))
        });
    }

    c.check("core.reproducing.fock", "<f, K_z> = f(z)", Some(1), 1e-8, || {
        let space = space_for(SpaceKind::Fock)?;
        let mut r = rng(cfg.seed, 10);
        let coeffs = CVector::from_iterator(space.dim(), (0..space.dim()).map(|_| random_c64(&mut r)));
        let coeffs = coeffs.unscale(coeffs.norm());
        let q = space.quadrature();
        let mut worst = 0.0_f64;
        for z in ball_points(n, 1.5) {
            let lhs = q.integrate(|w| {
                let f = space.basis_values(w).dot(&coeffs);
                f * kernel(&space, &z, w).expect("fock").conj()
            });
            let rhs = space.basis_values(&z).dot(&coeffs);
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(Outcome::value(worst))
    });

    c.check("core.reproducing.bergman", "<f, K_z> = f(z)", None, 1e-8, || {
        let space = space_for(SpaceKind::Bergman)?;
        let mut r = rng(cfg.seed, 11);
        let coeffs = CVector::from_iterator(space.dim(), (0..space.dim()).map(|_| random_c64(&mut r)));
        let coeffs = coeffs.unscale(coeffs.norm());
        let q = space.quadrature();
        let mut worst = 0.0_f64;
        for z in ball_points(n, 0.9) {
            let ez = space.basis_values(&z);
            let lhs = q.integrate(|w| {
                let ew = space.basis_values(w);
                ew.dot(&coeffs) * ez.dot(&ew.conjugate())
            });
            worst = worst.max((lhs - ez.dot(&coeffs)).norm());
        }
        Ok(Outcome::value(worst))
    });

    c.check("core.toeplitz.adjoint", "T_a^* = T_{conj a}", None, 1e-12, || {
        let space = space_for(kind)?;
        let mut worst = 0.0_f64;
        for a in symbols(cfg, n) {
            let t = toeplitz(&space, &a)?;
            let tc = toeplitz(&space, &conj_symbol(&a))?;
            worst = worst.max(max_abs(&(t.adjoint().entries() - tc.entries())));
        }
        Ok(Outcome::value(worst))
    });

    // The Cartesian quadrature is not rotation invariant, so a non-polynomial
    // radial profile leaves off-diagonal residue at quadrature accuracy.
    c.check("core.toeplitz.radial_diagonal", "radial a gives diagonal T_a", None, 1e-8, || {
        let space = space_for(kind)?;
        let mut worst = 0.0_f64;
        for a in symbols(cfg, n).into_iter().filter(Symbol::is_radial) {
            let t = toeplitz(&space, &a)?;
            let mut off = t.entries().clone();
            off.fill_diagonal(C64::new(0.0, 0.0));
            worst = worst.max(max_abs(&off));
        }
        Ok(Outcome::value(worst))
    });

    c.check("core.toeplitz.phi", "T_phi e_k = 2^{-(|k|+n)} e_k", None, 1e-12, || {
        let space = space_for(SpaceKind::Fock)?;
        let t = toeplitz(&space, &Symbol::phi(n))?;
        let expected = CMatrix::from_diagonal(&CVector::from_iterator(
            space.dim(),
            space.indices().iter().map(|k| C64::new(0.5f64.powi((k.degree() + n) as i32), 0.0)),
        ));
        Ok(Outcome::value(max_abs(&(t.entries() - expected))))
    });

    c.check("core.weyl.closed_form", "W_z = e^{-pi|z|^2/2} L(z)", None, 1e-8, || {
        let space = space_for(SpaceKind::Fock)?;
        let mut z = vec![C64::new(0.0, 0.0); n];
        z[0] = C64::new(0.3, -0.2);
        let a = weyl(&space, &z)?;
        let b = weyl_by_quadrature(&space, &z)?;
        Ok(Outcome::value(max_abs(&(a.entries() - b.entries()))))
    });

    c.check("core.parity.involution", "U^2 = I", None, 0.0, || {
        let space = space_for(SpaceKind::Fock)?;
        let u = parity(&space);
        let id = OperatorMatrix::identity(&space);
        Ok(Outcome::value(max_abs(&(u.compose(&u).entries() - id.entries()))))
    });

    c.check("core.berezin.phi", "B(Phi)(z) = e^{-pi|z|^2}", None, 1e-12, || {
        let space = space_for(SpaceKind::Fock)?;
        let b = berezin(&space, &phi_op(&space)?)?;
        let g = |z: &[C64]| C64::new((-std::f64::consts::PI * qhalab::fock::norm_sqr(z)).exp(), 0.0);
        Ok(Outcome::value(sup_error(&ball_points(n, 1.5), |z| b.eval(z), g)))
    });

    c.check("core.trace.phi", "tr(Phi) = 1", None, 1e-14, || {
        let space = space_for(SpaceKind::Fock)?;
        Ok(Outcome::value((phi_op(&space)?.trace() - C64::new(1.0, 0.0)).norm()))
    });
}
