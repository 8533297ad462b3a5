use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qhalab::groups::haar_unitary;
use qhalab::linalg::{max_abs, op_norm};
use qhalab::quadrature::gauss_laguerre;
use qhalab::{
    conv_fo, quasi_radialize, toeplitz, CMatrix, GroupElement, OperatorMatrix, SpectralGrid, Symbol, SymbolKind,
    TruncatedSpace, C64,
};

fn fock1() -> Arc<TruncatedSpace> {
    static S: OnceLock<Arc<TruncatedSpace>> = OnceLock::new();
    S.get_or_init(|| TruncatedSpace::fock(1, 10).unwrap()).clone()
}

fn fock2() -> Arc<TruncatedSpace> {
    static S: OnceLock<Arc<TruncatedSpace>> = OnceLock::new();
    S.get_or_init(|| TruncatedSpace::fock(2, 4).unwrap()).clone()
}

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn operator(space: Arc<TruncatedSpace>) -> impl Strategy<Value = OperatorMatrix> {
    let d = space.dim();
    prop::collection::vec(c64(), d * d)
        .prop_map(move |v| OperatorMatrix::new(space.clone(), CMatrix::from_vec(d, d, v)).unwrap())
}

fn point(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(c64(), n)
}

fn unitary(n: usize) -> impl Strategy<Value = CMatrix> {
    any::<u64>().prop_map(move |s| haar_unitary(n, &mut ChaCha8Rng::seed_from_u64(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn real_symbols_give_hermitian_toeplitz(a in -1.0..1.0f64, b in -2.0..2.0f64, k in 0.1..1.5f64) {
        let sym = Symbol::from_fn("real", SymbolKind::Composite, 1, move |z| {
            C64::new(a * (k * z[0].re).cos() + b * z[0].im * (-norm(z)).exp(), 0.0)
        });
        let t = toeplitz(&fock1(), &sym).unwrap();
        prop_assert_eq!(t.entries(), &t.entries().adjoint());
    }

    #[test]
    fn radial_symbols_give_diagonal_toeplitz(s in 0.2..3.0f64, amp in c64()) {
        let sym = Symbol::radial_profile("profile", 2, None, move |r2| amp / (1.0 + s * r2));
        let t = toeplitz(&fock2(), &sym).unwrap();
        let mut off = t.entries().clone();
        off.fill_diagonal(C64::new(0.0, 0.0));
        prop_assert!(max_abs(&off) < 1e-12);
    }

    #[test]
    fn quasi_radialization_is_an_idempotent_contraction(x in operator(fock2()), split in any::<bool>()) {
        let partition: &[usize] = if split { &[1, 1] } else { &[2] };
        let q = quasi_radialize(&x, partition).unwrap();
        let qq = quasi_radialize(&q, partition).unwrap();
        prop_assert!(max_abs(&(qq.entries() - q.entries())) < 1e-14);
        prop_assert!(q.norm() <= x.norm() + 1e-10);
    }

    #[test]
    fn coarser_partitions_average_more(x in operator(fock2())) {
        // Every U(2)-invariant operator is also T²-invariant.
        let full = quasi_radialize(&x, &[2]).unwrap();
        let both = quasi_radialize(&full, &[1, 1]).unwrap();
        prop_assert!(max_abs(&(both.entries() - full.entries())) < 1e-12);
    }

    #[test]
    fn group_law_on_points(a in unitary(2), b in unitary(2), s in point(2), t in point(2), w in point(2)) {
        let g = GroupElement::new(a, s).unwrap();
        let h = GroupElement::new(b, t).unwrap();
        let lhs = g.compose(&h).act_point(&w);
        let rhs = g.act_point(&h.act_point(&w));
        let back = g.inverse().act_point(&g.act_point(&w));
        for j in 0..2 {
            prop_assert!((lhs[j] - rhs[j]).norm() < 1e-12);
            prop_assert!((back[j] - w[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn averaging_against_phi_does_not_increase_the_norm(x in operator(fock1())) {
        let y = conv_fo(&Symbol::phi(1), &x).unwrap();
        prop_assert!(op_norm(y.entries()) <= op_norm(x.entries()) + 1e-10);
    }

    #[test]
    fn fft_round_trip(values in prop::collection::vec(c64(), 16 * 16)) {
        let grid = SpectralGrid::new(1, 3.0, 16).unwrap();
        let back = grid.inverse(&grid.forward(&values).unwrap()).unwrap();
        for (u, v) in values.iter().zip(&back) {
            prop_assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn laguerre_rules_are_exact_below_twice_the_order(m in 1usize..24, k in 0usize..48) {
        prop_assume!(k < 2 * m);
        let rule = gauss_laguerre(m);
        let exact: f64 = (1..=k).map(|i| i as f64).product();
        let got = rule.integrate(|x| x.powi(k as i32));
        prop_assert!((got - exact).abs() <= 1e-11 * exact);
    }
}

fn norm(z: &[C64]) -> f64 {
    PI * z.iter().map(|v| v.norm_sqr()).sum::<f64>()
}
