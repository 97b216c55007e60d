//! Orthonormal Haar basis on `[0, 1]`.
//!
//! Basis functions are ordered `Φ_1 = 1`, then `Φ_j` with `j = 2^{l-1} + p`,
//! `l >= 1`, `1 <= p <= 2^{l-1}`, equal to `+2^{(l-1)/2}` on
//! `[(p-1)/2^{l-1}, (p-1/2)/2^{l-1})`, `-2^{(l-1)/2}` on
//! `[(p-1/2)/2^{l-1}, p/2^{l-1})` and zero elsewhere. The space `L_m` is
//! spanned by the first `2^m` functions, which are exactly the functions
//! that are constant on the dyadic cells `[k/2^m, (k+1)/2^m)`.
//!
//! Intervals are right-open; the point `x = 1` takes the left limit.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{exp_integral, gauss_legendre4};
use crate::quadrature::MAX_LEVEL;
use crate::samples::SampledFunction;
use crate::{Error, Result};

/// Minimum number of sample intervals per dyadic cell when projecting data.
pub const MIN_SAMPLES_PER_CELL: usize = 8;

/// One-based Haar index `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HaarIndex(usize);

impl HaarIndex {
    pub fn new(j: usize) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidHaarIndex(j));
        }
        Ok(Self(j))
    }

    /// Index of the function with level `l >= 1` and offset `1 <= p <= 2^{l-1}`.
    pub fn from_level_offset(l: u32, p: usize) -> Result<Self> {
        if l == 0 || l > usize::BITS - 1 || p == 0 || p > (1usize << (l - 1)) {
            return Err(Error::InvalidHaarIndex(p));
        }
        Ok(Self((1usize << (l - 1)) + p))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Level `l`; zero for the constant function.
    pub fn level(self) -> u32 {
        if self.0 == 1 {
            0
        } else {
            usize::BITS - (self.0 - 1).leading_zeros()
        }
    }

    /// Offset `p`; zero for the constant function.
    pub fn offset(self) -> usize {
        match self.level() {
            0 => 0,
            l => self.0 - (1usize << (l - 1)),
        }
    }

    pub fn amplitude(self) -> f64 {
        match self.level() {
            0 => 1.0,
            l => libm::sqrt((1u64 << (l - 1)) as f64),
        }
    }

    /// `(lo, mid, hi)` of the support; `mid == hi` for the constant function.
    pub fn support(self) -> (f64, f64, f64) {
        match self.level() {
            0 => (0.0, 1.0, 1.0),
            l => {
                let scale = (1u64 << (l - 1)) as f64;
                let p = self.offset() as f64;
                ((p - 1.0) / scale, (p - 0.5) / scale, p / scale)
            }
        }
    }
}

/// `Φ_j(x)` for `x ∈ [0, 1]`.
pub fn haar_eval(j: HaarIndex, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::PointOutOfRange(x));
    }
    if j.level() == 0 {
        return Ok(1.0);
    }
    let (lo, mid, hi) = j.support();
    let amp = j.amplitude();
    let value = if x == 1.0 {
        if hi == 1.0 {
            -amp
        } else {
            0.0
        }
    } else if lo <= x && x < mid {
        amp
    } else if mid <= x && x < hi {
        -amp
    } else {
        0.0
    };
    Ok(value)
}

/// `∫_0^1 e^{-c t} Φ_j(t) dt` in closed form.
pub fn exp_haar_inner(c: f64, j: HaarIndex) -> Result<f64> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::InvalidParameter {
            name: "c",
            value: c,
            reason: "must be finite and non-negative",
        });
    }
    if j.level() == 0 {
        return Ok(exp_integral(c, 0.0, 1.0));
    }
    let (lo, mid, hi) = j.support();
    Ok(j.amplitude() * (exp_integral(c, lo, mid) - exp_integral(c, mid, hi)))
}

/// Coefficients of a function in `L_m`, in basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoefficients {
    level: u32,
    values: Vec<f64>,
}

impl HaarCoefficients {
    pub fn zeros(level: u32) -> Result<Self> {
        check_level(level)?;
        Ok(Self {
            level,
            values: vec![0.0; 1usize << level],
        })
    }

    pub fn from_values(level: u32, values: Vec<f64>) -> Result<Self> {
        check_level(level)?;
        let expected = 1usize << level;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        Ok(Self { level, values })
    }

    /// Haar analysis of the integrals `∫_{cell_k} f` over the `2^m` dyadic cells.
    pub fn from_cell_integrals(cells: &[f64]) -> Result<Self> {
        let n = cells.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: n.next_power_of_two().max(1),
                actual: n,
            });
        }
        let level = n.trailing_zeros();
        check_level(level)?;
        let mut values = vec![0.0; n];
        // sums over dyadic intervals, finest first
        let mut sums = cells.to_vec();
        for l in (1..=level).rev() {
            // `sums` holds 2^l interval sums; functions of level l live on 2^{l-1} intervals
            let amp = libm::sqrt((1u64 << (l - 1)) as f64);
            let base = 1usize << (l - 1);
            for p in 0..base {
                values[base + p] = amp * (sums[2 * p] - sums[2 * p + 1]);
            }
            sums = sums.chunks(2).map(|c| c[0] + c[1]).collect();
        }
        values[0] = sums[0];
        Ok(Self { level, values })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Euclidean norm, equal to the `L²` norm of the represented function.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| v * v).sum())
    }

    /// Zero-pads into `L_level`, which contains `L_{self.level}`.
    pub fn embed(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::LevelShrink {
                previous: self.level,
                requested: level,
            });
        }
        check_level(level)?;
        let mut values = vec![0.0; 1usize << level];
        values[..self.values.len()].copy_from_slice(&self.values);
        Ok(Self { level, values })
    }

    /// Value of the represented function at `x ∈ [0, 1]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::PointOutOfRange(x));
        }
        let n = self.values.len();
        let cell = ((x * n as f64) as usize).min(n - 1);
        Ok(self.cell_value(cell))
    }

    /// Constant values on the `2^level` dyadic cells.
    pub fn cell_values(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| self.cell_value(k)).collect()
    }

    fn cell_value(&self, cell: usize) -> f64 {
        let m = self.level;
        let mut value = self.values[0];
        for l in 1..=m {
            let interval = cell >> (m - l + 1);
            let second_half = (cell >> (m - l)) & 1 == 1;
            let amp = libm::sqrt((1u64 << (l - 1)) as f64);
            let c = self.values[(1usize << (l - 1)) + interval];
            if second_half {
                value -= amp * c;
            } else {
                value += amp * c;
            }
        }
        value
    }
}

fn check_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::LevelTooHigh {
            level,
            max: MAX_LEVEL,
        });
    }
    Ok(())
}

/// `⟨f, Φ_j⟩` for `j = 1..=2^m`, integrating `f` with 4-point Gauss-Legendre
/// on every dyadic cell.
pub fn project(f: impl Fn(f64) -> f64, m: u32) -> Result<HaarCoefficients> {
    check_level(m)?;
    let n = 1usize << m;
    let h = 1.0 / n as f64;
    let cells: Vec<f64> = (0..n)
        .map(|k| gauss_legendre4(&f, k as f64 * h, (k + 1) as f64 * h))
        .collect();
    HaarCoefficients::from_cell_integrals(&cells)
}

/// `⟨f, Φ_j⟩` for sampled data; every dyadic cell must contain at least
/// [`MIN_SAMPLES_PER_CELL`] grid intervals.
pub fn project_samples(f: &SampledFunction, m: u32) -> Result<HaarCoefficients> {
    check_level(m)?;
    let n = 1usize << m;
    let per = f.intervals_per_cell(n, MIN_SAMPLES_PER_CELL)?;
    let cells: Vec<f64> = (0..n).map(|k| f.integral(k * per, (k + 1) * per)).collect();
    HaarCoefficients::from_cell_integrals(&cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn idx(j: usize) -> HaarIndex {
        HaarIndex::new(j).unwrap()
    }

    /// `⟨Φ_i, Φ_j⟩` by exact integration of the piecewise-constant product on
    /// the finest cells both functions are constant on.
    fn exact_inner(i: HaarIndex, j: HaarIndex) -> f64 {
        let level = i.level().max(j.level()) + 1;
        let n = 1usize << level;
        let h = 1.0 / n as f64;
        (0..n)
            .map(|k| {
                let x = (k as f64 + 0.5) * h;
                haar_eval(i, x).unwrap() * haar_eval(j, x).unwrap() * h
            })
            .sum()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(haar_eval(idx(1), 0.3).unwrap(), 1.0);
        assert_eq!(haar_eval(idx(2), 0.25).unwrap(), 1.0);
        assert_eq!(haar_eval(idx(2), 0.75).unwrap(), -1.0);
        assert_eq!(haar_eval(idx(3), 0.6).unwrap(), 0.0);
        assert_eq!(haar_eval(idx(4), 0.6).unwrap(), libm::sqrt(2.0));
        assert_eq!(haar_eval(idx(2), 1.0).unwrap(), -1.0);
        assert_eq!(haar_eval(idx(3), 1.0).unwrap(), 0.0);
        assert!(haar_eval(idx(2), 1.5).is_err());
        assert!(haar_eval(idx(2), -0.1).is_err());
        assert!(HaarIndex::new(0).is_err());
    }

    #[test]
    fn level_offset_decomposition() {
        assert_eq!((idx(2).level(), idx(2).offset()), (1, 1));
        assert_eq!((idx(3).level(), idx(3).offset()), (2, 1));
        assert_eq!((idx(4).level(), idx(4).offset()), (2, 2));
        assert_eq!((idx(5).level(), idx(5).offset()), (3, 1));
        assert_eq!((idx(8).level(), idx(8).offset()), (3, 4));
        assert_eq!((idx(9).level(), idx(9).offset()), (4, 1));
        assert!(HaarIndex::from_level_offset(2, 3).is_err());
    }

    #[test]
    fn gram_is_identity() {
        for m in 0..=8u32 {
            let n = 1usize << m;
            // only check a band for the largest levels to bound runtime
            let stride = if m >= 7 { 7 } else { 1 };
            for i in (1..=n).step_by(stride) {
                for j in 1..=n {
                    let g = exact_inner(idx(i), idx(j));
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((g - expected).abs() < 1e-12, "m={m} i={i} j={j} g={g}");
                }
            }
        }
    }

    #[test]
    fn exp_inner_examples() {
        assert!((exp_haar_inner(0.0, idx(1)).unwrap() - 1.0).abs() < 1e-15);
        for j in 2..40 {
            assert!(exp_haar_inner(0.0, idx(j)).unwrap().abs() < 1e-15);
        }
        let v = exp_haar_inner(1.0, idx(1)).unwrap();
        assert!((v - 0.632_120_558_8).abs() < 1e-10);
        assert!(exp_haar_inner(-1.0, idx(1)).is_err());
        assert!(exp_haar_inner(f64::NAN, idx(1)).is_err());
    }

    #[test]
    fn exp_inner_matches_projection() {
        for &c in &[0.0, 1e-8, 0.37, 1.0] {
            let coeffs = project(|t| libm::exp(-c * t), 4).unwrap();
            for j in 1..=16 {
                let a = exp_haar_inner(c, idx(j)).unwrap();
                assert!((a - coeffs.values()[j - 1]).abs() < 1e-12, "c={c} j={j}");
            }
        }
    }

    #[test]
    fn project_examples() {
        let one = project(|_| 1.0, 3).unwrap();
        assert!((one.values()[0] - 1.0).abs() < 1e-15);
        assert!(one.values()[1..].iter().all(|v| v.abs() < 1e-15));

        let phi5 = project(|x| haar_eval(idx(5), x).unwrap(), 3).unwrap();
        for (k, v) in phi5.values().iter().enumerate() {
            let expected = if k == 4 { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-12);
        }

        // ∫ t dt = 1/2; ∫_0^{1/2} t - ∫_{1/2}^1 t = 1/8 - 3/8 = -1/4
        let lin = project(|t| t, 1).unwrap();
        assert!((lin.values()[0] - 0.5).abs() < 1e-15);
        assert!((lin.values()[1] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn sampled_projection() {
        let f = SampledFunction::from_fn(180 * 8, |_| 1.0);
        let c = project_samples(&f, 3).unwrap();
        assert!((c.values()[0] - 1.0).abs() < 1e-13);
        let phi2 = SampledFunction::from_fn(180 * 8, |x| if x < 0.5 { 1.0 } else { -1.0 });
        let c = project_samples(&phi2, 3).unwrap();
        // the jump at 1/2 sits on a node shared by two cells; trapezoid sees it at half weight
        assert!((c.values()[1] - 1.0).abs() < 2.0 / (180.0 * 8.0));
        assert!(project_samples(&SampledFunction::from_fn(32, |_| 0.0), 3).is_err());
    }

    #[test]
    fn parseval_on_aligned_piecewise_constants() {
        let values = [0.3, -1.2, 2.0, 0.7, 0.0, 5.5, -0.25, 1.0];
        let f = |x: f64| values[((x * 8.0) as usize).min(7)];
        let c = project(f, 3).unwrap();
        let norm2: f64 = values.iter().map(|v| v * v / 8.0).sum();
        assert!((c.norm() * c.norm() - norm2).abs() < 1e-12);
        let back = c.cell_values();
        for (a, b) in back.iter().zip(values) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn projection_error_decreases() {
        // ‖P_m t - t‖² = ‖t‖² - ‖P_m t‖² = 1/3 - Σ c²
        let mut prev = f64::INFINITY;
        for m in 1..=8 {
            let c = project(|t| t, m).unwrap();
            let err = libm::sqrt((1.0 / 3.0 - c.norm() * c.norm()).max(0.0));
            assert!(err <= prev);
            prev = err;
        }
        assert!(prev < 2e-3);
    }

    proptest! {
        #[test]
        fn index_round_trip(j in 2usize..1_000_000) {
            let h = idx(j);
            let back = HaarIndex::from_level_offset(h.level(), h.offset()).unwrap();
            prop_assert_eq!(back, h);
        }

        #[test]
        fn embedding_preserves_function(
            values in proptest::collection::vec(-10.0f64..10.0, 8),
            extra in 0u32..4,
            x in 0.0f64..=1.0,
        ) {
            let c = HaarCoefficients::from_values(3, values).unwrap();
            let e = c.embed(3 + extra).unwrap();
            prop_assert!((c.eval(x).unwrap() - e.eval(x).unwrap()).abs() < 1e-14);
        }
    }
}
