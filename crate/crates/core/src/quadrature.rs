//! One-dimensional Gaussian rules.
//!
//! Nodes come from the Golub–Welsch eigenproblem and are then polished by
//! Newton iteration on the orthonormal three-term recurrence. Weights use the
//! Christoffel sum `1 / Σ_k p_k(x)²`, which stays relatively accurate for the
//! tiny weights at the tails of Hermite rules.

use nalgebra::DMatrix;

/// Nodes and weights of a one-dimensional rule.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Orthonormal recurrence `x p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1}`.
struct Recurrence {
    a: Vec<f64>,
    /// `b[k]` couples `p_{k-1}` and `p_k`; `b[0]` is unused.
    b: Vec<f64>,
    mu0: f64,
}

impl Recurrence {
    /// Returns `(p_m(x), p_m'(x), Σ_{k<m} p_k(x)²)`.
    fn eval(&self, m: usize, x: f64) -> (f64, f64, f64) {
        let mut p_prev = 0.0;
        let mut p = 1.0 / self.mu0.sqrt();
        let mut dp_prev = 0.0;
        let mut dp = 0.0;
        let mut sum = 0.0;
        for k in 0..m {
            sum += p * p;
            let b_next = self.b[k + 1];
            let b_k = if k == 0 { 0.0 } else { self.b[k] };
            let p_next = ((x - self.a[k]) * p - b_k * p_prev) / b_next;
            let dp_next = ((x - self.a[k]) * dp + p - b_k * dp_prev) / b_next;
            p_prev = p;
            p = p_next;
            dp_prev = dp;
            dp = dp_next;
        }
        (p, dp, sum)
    }

    fn rule(&self, m: usize) -> GaussRule {
        if m == 0 {
            return GaussRule {
                nodes: vec![],
                weights: vec![],
            };
        }
        let mut jac = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            jac[(k, k)] = self.a[k];
            if k + 1 < m {
                jac[(k, k + 1)] = self.b[k + 1];
                jac[(k + 1, k)] = self.b[k + 1];
            }
        }
        let mut nodes: Vec<f64> = jac.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        let mut weights = Vec::with_capacity(m);
        for x in nodes.iter_mut() {
            for _ in 0..8 {
                let (p, dp, _) = self.eval(m, *x);
                if dp == 0.0 {
                    break;
                }
                let step = p / dp;
                *x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, _, sum) = self.eval(m, *x);
            weights.push(1.0 / sum);
        }
        GaussRule { nodes, weights }
    }
}

/// Gauss–Hermite rule for the weight `e^{-t²}` on the real line.
pub fn gauss_hermite(m: usize) -> GaussRule {
    let a = vec![0.0; m + 1];
    let b = (0..=m + 1).map(|k| (k as f64 / 2.0).sqrt()).collect();
    Recurrence {
        a,
        b,
        mu0: std::f64::consts::PI.sqrt(),
    }
    .rule(m)
}

/// Gauss–Laguerre rule for the weight `e^{-x}` on `[0, ∞)`.
pub fn gauss_laguerre(m: usize) -> GaussRule {
    let a = (0..=m).map(|k| 2.0 * k as f64 + 1.0).collect();
    let b = (0..=m + 1).map(|k| k as f64).collect();
    Recurrence { a, b, mu0: 1.0 }.rule(m)
}

/// Gauss–Jacobi rule for the weight `(1-x)^α (1+x)^β` on `[-1, 1]`.
pub fn gauss_jacobi(m: usize, alpha: f64, beta: f64) -> GaussRule {
    let ab = alpha + beta;
    let mut a = Vec::with_capacity(m + 1);
    let mut b = vec![0.0; m + 2];
    for k in 0..=m {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let ak = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        };
        a.push(ak);
    }
    for (k, bk) in b.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let num = 4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab);
        let den = s * s * (s + 1.0) * (s - 1.0);
        *bk = (num / den).sqrt();
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
    Recurrence { a, b, mu0 }.rule(m)
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> GaussRule {
    gauss_jacobi(m, 0.0, 0.0)
}

/// Rule on `[0, 1]` for the weight `(1-u)^α`.
pub fn unit_interval_jacobi(m: usize, alpha: f64) -> GaussRule {
    let base = gauss_jacobi(m, alpha, 0.0);
    let scale = 2f64.powf(-alpha - 1.0);
    GaussRule {
        nodes: base.nodes.iter().map(|x| 0.5 * (1.0 + x)).collect(),
        weights: base.weights.iter().map(|w| w * scale).collect(),
    }
}

/// Lanczos approximation, adequate for the small arguments used here.
fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = COEF[0];
        let t = x + G + 0.5;
        for (i, c) in COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hermite_moments() {
        let r = gauss_hermite(20);
        assert!((r.integrate(|_| 1.0) - PI.sqrt()).abs() < 1e-14);
        assert!((r.integrate(|x| x * x) - PI.sqrt() / 2.0).abs() < 1e-14);
        // ∫ t^8 e^{-t²} = 105 √π / 16
        assert!((r.integrate(|x| x.powi(8)) - 105.0 * PI.sqrt() / 16.0).abs() < 1e-12);
        assert!(r.integrate(|x| x.powi(5)).abs() < 1e-13);
    }

    #[test]
    fn hermite_high_order_weights_positive() {
        let r = gauss_hermite(96);
        assert!(r.weights.iter().all(|&w| w > 0.0));
        assert!((r.integrate(|_| 1.0) - PI.sqrt()).abs() < 1e-13);
        // ∫ cos(t) e^{-t²} = √π e^{-1/4}
        assert!((r.integrate(f64::cos) - PI.sqrt() * (-0.25f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn legendre_and_jacobi() {
        let r = gauss_legendre(12);
        assert!((r.integrate(|_| 1.0) - 2.0).abs() < 1e-14);
        assert!((r.integrate(|x| x.powi(10)) - 2.0 / 11.0).abs() < 1e-14);
        let j = unit_interval_jacobi(10, 2.0);
        // ∫_0^1 (1-u)² u³ du = B(4, 3) = 3! 2! / 6! = 1/60
        assert!((j.integrate(|u| u.powi(3)) - 1.0 / 60.0).abs() < 1e-15);
        assert!((j.integrate(|_| 1.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(5.0) - 24.0).abs() < 1e-11);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-13);
    }
}
