//! Compound Simpson rule for the degenerate-kernel approximation of `K*K`,
//! and the fine uniform partition used by the Taylor approximation of `K*`.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Number of Taylor subintervals per dyadic cell of the Simpson step.
pub const TAYLOR_REFINEMENT: usize = 180;

/// Highest level accepted anywhere in the crate (`2^20` basis functions).
pub const MAX_LEVEL: u32 = 20;

/// Compound Simpson rule on `[0, 1]` with step `2^-m`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    level: u32,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Collocation points `s_j = (j - 1) / 2^m`, `j = 1..=2^m + 1`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ_j β_j h(s_j)`.
    pub fn apply(&self, h: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * h(s))
            .sum()
    }
}

/// Builds the compound Simpson rule with `2^m + 1` points.
///
/// End weights are `(1/3)/2^m`; interior weights alternate `(4/3)/2^m` at
/// even (one-based) indices and `(2/3)/2^m` at odd ones. Level 0 would give
/// two points with weights summing to `2/3`, so `m >= 1` is required.
pub fn simpson_rule(m: u32) -> Result<QuadratureRule> {
    if m < 1 {
        return Err(Error::LevelTooLow { level: m, min: 1 });
    }
    if m > MAX_LEVEL {
        return Err(Error::LevelTooHigh {
            level: m,
            max: MAX_LEVEL,
        });
    }
    let panels = 1usize << m;
    let h = 1.0 / panels as f64;
    let points = (0..=panels).map(|i| i as f64 * h).collect();
    let weights = (1..=panels + 1)
        .map(|j| {
            let numerator = if j == 1 || j == panels + 1 {
                1.0 / 3.0
            } else if j % 2 == 0 {
                4.0 / 3.0
            } else {
                2.0 / 3.0
            };
            numerator * h
        })
        .collect();
    Ok(QuadratureRule {
        level: m,
        points,
        weights,
    })
}

/// Uniform partition of `[0, 1]` into `180 * 2^m` subintervals `D_j = [d_{j-1}, d_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPartition {
    level: u32,
    nodes: Vec<f64>,
}

impl TaylorPartition {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// `d_0 = 0 < d_1 < ... < d_N = 1`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of subintervals `N`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> f64 {
        1.0 / self.intervals() as f64
    }
}

pub fn taylor_partition(m: u32) -> Result<TaylorPartition> {
    if m < 1 {
        return Err(Error::LevelTooLow { level: m, min: 1 });
    }
    if m > MAX_LEVEL {
        return Err(Error::LevelTooHigh {
            level: m,
            max: MAX_LEVEL,
        });
    }
    let n = TAYLOR_REFINEMENT << m;
    let nodes = (0..=n).map(|j| j as f64 / n as f64).collect();
    Ok(TaylorPartition { level: m, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn level_one_weights() {
        let rule = simpson_rule(1).unwrap();
        assert_eq!(rule.points(), &[0.0, 0.5, 1.0]);
        let expected = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];
        for (w, e) in rule.weights().iter().zip(expected) {
            assert!((w - e).abs() < 1e-16);
        }
        assert!((rule.weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn level_two_integrates_square() {
        let rule = simpson_rule(2).unwrap();
        assert!((rule.apply(|s| s * s) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn weight_pattern_and_sum() {
        for m in 1..=12 {
            let rule = simpson_rule(m).unwrap();
            let n = 1usize << m;
            assert_eq!(rule.len(), n + 1);
            let h = 1.0 / n as f64;
            assert_eq!(rule.weights()[0], h / 3.0);
            assert_eq!(rule.weights()[n], h / 3.0);
            for j in 2..=n {
                let expected = if j % 2 == 0 { 4.0 / 3.0 } else { 2.0 / 3.0 } * h;
                assert_eq!(rule.weights()[j - 1], expected);
            }
            assert!((rule.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(rule.points().windows(2).all(|p| p[0] < p[1]));
            assert_eq!(rule.points()[n], 1.0);
        }
    }

    #[test]
    fn level_zero_rejected() {
        assert!(matches!(simpson_rule(0), Err(Error::LevelTooLow { .. })));
        assert!(matches!(
            taylor_partition(0),
            Err(Error::LevelTooLow { .. })
        ));
    }

    #[test]
    fn partition_sizes() {
        let p1 = taylor_partition(1).unwrap();
        assert_eq!(p1.intervals(), 360);
        assert_eq!(p1.nodes()[360], 1.0);
        assert!((p1.width() - 1.0 / 360.0).abs() < 1e-18);
        let p2 = taylor_partition(2).unwrap();
        assert_eq!(p2.intervals(), 720);
        assert!((p2.nodes()[1] - 1.0 / 720.0).abs() < 1e-18);
        for m in 1..=6 {
            let p = taylor_partition(m).unwrap();
            let w = 1.0 / (180.0 * (1u64 << m) as f64);
            assert_eq!(p.nodes()[0], 0.0);
            assert!(p
                .nodes()
                .windows(2)
                .all(|d| ((d[1] - d[0]) - w).abs() < 1e-15));
        }
    }

    #[test]
    fn kernel_product_error_within_c1_bound() {
        let c1 = 16.0 / 180.0;
        for m in 1..=5 {
            let rule = simpson_rule(m).unwrap();
            let bound = c1 / (1u64 << (4 * m)) as f64;
            for i in 0..=10 {
                for k in 0..=10 {
                    let sum = (i + k) as f64 / 10.0;
                    let exact = if sum == 0.0 {
                        1.0
                    } else {
                        -libm::expm1(-sum) / sum
                    };
                    let approx = rule.apply(|s| libm::exp(-s * sum));
                    assert!((exact - approx).abs() <= bound, "m={m} x+z={sum}");
                }
            }
        }
    }

    #[test]
    fn observed_order_on_smooth_integrand() {
        let exact = 1.0 - libm::exp(-2.0); // ∫ 2 e^{-2s}
        let err = |m| {
            (simpson_rule(m)
                .unwrap()
                .apply(|s| 2.0 * libm::exp(-2.0 * s))
                - exact)
                .abs()
        };
        for m in 1..=5 {
            let order = libm::log2(err(m) / err(m + 1));
            assert!(order >= 3.8, "m={m} order={order}");
        }
    }

    proptest! {
        #[test]
        fn exact_on_cubics(m in 1u32..10, c in proptest::array::uniform4(-5.0f64..5.0)) {
            let rule = simpson_rule(m).unwrap();
            let p = |s: f64| c[0] + c[1] * s + c[2] * s * s + c[3] * s * s * s;
            let exact = c[0] + c[1] / 2.0 + c[2] / 3.0 + c[3] / 4.0;
            prop_assert!((rule.apply(p) - exact).abs() < 1e-13);
        }
    }
}
