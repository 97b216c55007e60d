//! The inverse Laplace transform test problem on `[0, 1]` and the average
//! pointwise error metric.

use crate::haar::HaarCoefficients;
use crate::kernel::{ExpKernel, Kernel};

/// Problem data: kernel, exact right-hand side and, when known, the exact
/// solution and its norm.
#[derive(Debug, Clone, Copy)]
pub struct Problem<K> {
    pub kernel: K,
    pub exact_rhs: fn(f64) -> f64,
    pub exact_solution: Option<fn(f64) -> f64>,
    pub y_norm: Option<f64>,
}

impl<K: Kernel> Problem<K> {
    pub fn kernel(&self) -> &K {
        &self.kernel
    }
}

/// `f(s) = ∫_0^1 e^{-st} t dt = (1 - (s + 1) e^{-s}) / s²`.
///
/// Below `s = 1e-3` the Taylor series `Σ_k (-s)^k / (k! (k + 2))` replaces
/// the closed form, which has a removable singularity at zero.
pub fn laplace_rhs(s: f64) -> f64 {
    if libm::fabs(s) < 1e-3 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..8 {
            sum += term / (k as f64 + 2.0);
            term *= -s / (k as f64 + 1.0);
        }
        sum
    } else {
        (-libm::expm1(-s) - s * libm::exp(-s)) / (s * s)
    }
}

fn identity(t: f64) -> f64 {
    t
}

/// `∫_0^1 e^{-st} u(t) dt = f(s)` with `u(t) = t`, `‖u‖ = 1/√3`.
pub fn exact_problem() -> Problem<ExpKernel> {
    Problem {
        kernel: ExpKernel,
        exact_rhs: laplace_rhs,
        exact_solution: Some(identity),
        y_norm: Some(1.0 / libm::sqrt(3.0)),
    }
}

/// Points of the average-error metric: `t_j = 0.01 (j - 1)`, `j = 1..=100`.
pub fn avg_points() -> impl Iterator<Item = f64> {
    (0..100).map(|j| 0.01 * j as f64)
}

/// `(1/100) Σ_j |u(t_j) - u_approx(t_j)|` over [`avg_points`].
pub fn avg_error(approx: &HaarCoefficients, exact: impl Fn(f64) -> f64) -> f64 {
    avg_points()
        .map(|t| {
            let u = approx.eval(t).expect("avg points lie in [0, 1)");
            libm::fabs(exact(t) - u)
        })
        .sum::<f64>()
        / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::project;
    use crate::math::gauss_legendre4;

    #[test]
    fn rhs_values() {
        assert_eq!(laplace_rhs(0.0), 0.5);
        assert!((laplace_rhs(1.0) - (1.0 - 2.0 * libm::exp(-1.0))).abs() < 1e-15);
        // dense midpoint rule with 10⁶ points
        let n = 1_000_000;
        let h = 1.0 / n as f64;
        let dense: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                libm::exp(-0.5 * t) * t
            })
            .sum::<f64>()
            * h;
        assert!((laplace_rhs(0.5) - dense).abs() < 1e-12);
        assert!((laplace_rhs(0.5) - 0.360_816).abs() < 1e-6);
    }

    #[test]
    fn rhs_branches_agree_at_threshold() {
        let closed = |s: f64| (-libm::expm1(-s) - s * libm::exp(-s)) / (s * s);
        for s in [1e-3 - 1e-12, 1e-3, 1e-3 + 1e-12] {
            assert!((laplace_rhs(s) - closed(s)).abs() < 1e-12);
        }
        let series_at = laplace_rhs(1e-3 - 1e-15);
        assert!((series_at - closed(1e-3)).abs() < 1e-12);
    }

    #[test]
    fn exact_solution_solves_equation() {
        let p = exact_problem();
        let u = p.exact_solution.unwrap();
        let mut worst = 0.0f64;
        for i in 0..1024 {
            let s = (i as f64 + 0.5) / 1024.0;
            let ku: f64 = (0..64)
                .map(|k| {
                    gauss_legendre4(
                        |t| p.kernel.eval(s, t) * u(t),
                        k as f64 / 64.0,
                        (k + 1) as f64 / 64.0,
                    )
                })
                .sum();
            worst = worst.max((ku - (p.exact_rhs)(s)).abs());
        }
        assert!(worst < 1e-6);
        assert!((p.y_norm.unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn avg_examples() {
        let zero = HaarCoefficients::zeros(3).unwrap();
        assert!((avg_error(&zero, |t| t) - 0.495).abs() < 1e-14);
        assert!((avg_error(&zero, |_| 0.1) - 0.1).abs() < 1e-15);
        let step = project(|x| if x < 0.5 { 0.25 } else { 0.75 }, 1).unwrap();
        let exact = |x: f64| if x < 0.5 { 0.25 } else { 0.75 };
        assert!(avg_error(&step, exact) < 1e-15);
    }
}
