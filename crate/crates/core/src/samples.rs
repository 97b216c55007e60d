//! Data given as node samples on a uniform grid of `[0, 1]`.
//!
//! Integrals over grid-aligned subintervals use the trapezoid rule, and
//! the L² norm is the trapezoid norm of the samples.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Values `f(i / N)` for `i = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: values.len(),
            });
        }
        Ok(Self { values })
    }

    pub fn from_fn(intervals: usize, f: impl Fn(f64) -> f64) -> Self {
        let n = intervals.max(1);
        let values = (0..=n).map(|i| f(i as f64 / n as f64)).collect();
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.intervals() as f64
    }

    /// Trapezoid weights `h/2, h, ..., h, h/2`.
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        let h = self.step();
        if i == 0 || i == self.intervals() {
            0.5 * h
        } else {
            h
        }
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(
            self.values
                .iter()
                .enumerate()
                .map(|(i, v)| self.trapezoid_weight(i) * v * v)
                .sum::<f64>(),
        )
    }

    /// Trapezoid `L²` distance to another sampled function on the same grid.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        if other.values.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                actual: other.values.len(),
            });
        }
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| self.trapezoid_weight(i) * (a - b) * (a - b))
            .sum();
        Ok(libm::sqrt(sum))
    }

    /// Trapezoid integral of `f` over nodes `lo..=hi`.
    pub fn integral(&self, lo: usize, hi: usize) -> f64 {
        let h = self.step();
        let seg = &self.values[lo..=hi];
        seg.windows(2).map(|p| p[0] + p[1]).sum::<f64>() * 0.5 * h
    }

    /// Trapezoid integral of `(s - origin) f(s)` over nodes `lo..=hi`.
    pub fn moment(&self, lo: usize, hi: usize, origin: f64) -> f64 {
        let h = self.step();
        let g = |i: usize| (self.node(i) - origin) * self.values[i];
        (lo..hi).map(|i| g(i) + g(i + 1)).sum::<f64>() * 0.5 * h
    }

    /// Number of grid intervals per cell when `[0, 1]` is split into `cells`
    /// equal cells, provided the grid refines them with at least
    /// `min_per_cell` intervals each.
    pub fn intervals_per_cell(&self, cells: usize, min_per_cell: usize) -> Result<usize> {
        let n = self.intervals();
        if cells == 0 || !n.is_multiple_of(cells) || n / cells < min_per_cell {
            return Err(Error::GridTooCoarse {
                intervals: n,
                required: cells,
                min_per_cell,
            });
        }
        Ok(n / cells)
    }
}
