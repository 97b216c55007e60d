//! Haar-coordinate matrices and vectors of the finite-dimensional operators.
//!
//! * `A_m` represents `T^(m) = Σ_l β_l k(s_l, ·) ⟨k(s_l, ·), ·⟩`, the compound
//!   Simpson approximation of `K*K`.
//! * `B_m` represents `Q^(m)`, the same construction for `KK*` with slices
//!   `k(·, s_l)`.
//! * `v` holds `⟨K*_m f, Φ_i⟩`, where `K*_m` replaces `k(s, t)` on every
//!   Taylor subinterval `D_j` by its first-order expansion about `d_{j-1}`.
//! * `g` holds `⟨f, Φ_i⟩`.

use alloc::vec;
use alloc::vec::Vec;

use crate::haar::{project_samples, HaarCoefficients};
use crate::kernel::Kernel;
use crate::math::gauss_legendre4_nodes;
use crate::matrix::SquareMatrix;
use crate::quadrature::{simpson_rule, taylor_partition, TaylorPartition, MAX_LEVEL};
use crate::samples::SampledFunction;
use crate::{Error, Result};

/// Which kernel slices build the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Slices `k(s_l, ·)`: the matrix of `T^(m)`.
    Domain,
    /// Slices `k(·, s_l)`: the matrix of `Q^(m)`.
    Range,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    level: u32,
    side: Side,
    matrix: SquareMatrix,
}

impl GramMatrix {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

fn check_level(m: u32) -> Result<()> {
    if m < 1 {
        return Err(Error::LevelTooLow { level: m, min: 1 });
    }
    if m > MAX_LEVEL {
        return Err(Error::LevelTooHigh {
            level: m,
            max: MAX_LEVEL,
        });
    }
    Ok(())
}

/// Haar coefficients of one kernel slice through the collocation point `s`.
fn slice_coefficients<K: Kernel>(kernel: &K, s: f64, m: u32, side: Side) -> Result<Vec<f64>> {
    let n = 1usize << m;
    let h = 1.0 / n as f64;
    let mut cells = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
        let v = match side {
            Side::Domain => kernel.integrate_t(s, a, b),
            Side::Range => kernel.integrate_s(s, a, b),
        };
        if !v.is_finite() {
            return Err(Error::NonFiniteKernel { s, t: a });
        }
        cells.push(v);
    }
    Ok(HaarCoefficients::from_cell_integrals(&cells)?.into_values())
}

/// `(A_m)_{ij} = Σ_l β_l ⟨k(s_l,·), Φ_i⟩ ⟨k(s_l,·), Φ_j⟩` (or the range-side
/// analogue), summed over the `2^m + 1` compound Simpson nodes.
pub fn assemble_gram<K: Kernel>(kernel: &K, m: u32, side: Side) -> Result<GramMatrix> {
    check_level(m)?;
    let rule = simpson_rule(m)?;
    let n = 1usize << m;
    let mut matrix = SquareMatrix::zeros(n);
    for (&s, &beta) in rule.points().iter().zip(rule.weights()) {
        let v = slice_coefficients(kernel, s, m, side)?;
        matrix.add_outer(beta, &v);
    }
    // mirror the lower triangle so the matrix is exactly symmetric
    for i in 0..n {
        for j in 0..i {
            let v = matrix.get(i, j);
            matrix.set(j, i, v);
        }
    }
    Ok(GramMatrix {
        level: m,
        side,
        matrix,
    })
}

/// `v_i = ⟨K*_m f, Φ_i⟩`, `i = 1..=2^m`, with
/// `K*_m f(t) = Σ_j ∫_{D_j} [k(d_{j-1}, t) + (s - d_{j-1}) ∂_s k(d_{j-1}, t)] f(s) ds`.
///
/// The `s`-integrals use the trapezoid rule on the samples, which must
/// refine the partition; the `t`-integrals against `Φ_i` go through the
/// kernel's cell integrals.
pub fn assemble_rhs<K: Kernel>(
    kernel: &K,
    partition: &TaylorPartition,
    samples: &SampledFunction,
    m: u32,
) -> Result<HaarCoefficients> {
    check_level(m)?;
    let n = 1usize << m;
    let h = 1.0 / n as f64;
    rhs_cells(partition, samples, m, |_, d, k| {
        let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
        (kernel.integrate_t(d, a, b), kernel.integrate_ds_t(d, a, b))
    })
}

/// Above this many `(piece, cell)` pairs the kernel cell integrals of the
/// right-hand side are recomputed per call instead of stored.
const RHS_TABLE_LIMIT: usize = 1 << 22;

/// Kernel cell integrals `(∫_cell k(d_j, t) dt, ∫_cell ∂_s k(d_j, t) dt)`
/// for every Taylor node `d_j` and Haar cell, row-major by node.
fn rhs_table<K: Kernel>(
    kernel: &K,
    partition: &TaylorPartition,
    m: u32,
) -> Option<Vec<(f64, f64)>> {
    let n = 1usize << m;
    let pieces = partition.intervals();
    if pieces * n > RHS_TABLE_LIMIT {
        return None;
    }
    let h = 1.0 / n as f64;
    let mut table = Vec::with_capacity(pieces * n);
    for &d in &partition.nodes()[..pieces] {
        for k in 0..n {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            table.push((kernel.integrate_t(d, a, b), kernel.integrate_ds_t(d, a, b)));
        }
    }
    Some(table)
}

fn rhs_cells(
    partition: &TaylorPartition,
    samples: &SampledFunction,
    m: u32,
    integrals: impl Fn(usize, f64, usize) -> (f64, f64),
) -> Result<HaarCoefficients> {
    let pieces = partition.intervals();
    let per = samples.intervals_per_cell(pieces, 1)?;
    let n = 1usize << m;
    let mut cells = vec![0.0; n];
    for (j, &d) in partition.nodes()[..pieces].iter().enumerate() {
        let lo = j * per;
        let mass = samples.integral(lo, lo + per);
        let moment = samples.moment(lo, lo + per, d);
        if mass == 0.0 && moment == 0.0 {
            continue;
        }
        for (k, cell) in cells.iter_mut().enumerate() {
            let (kt, kds) = integrals(j, d, k);
            *cell += mass * kt + moment * kds;
        }
    }
    HaarCoefficients::from_cell_integrals(&cells)
}

/// `g_i = ⟨f, Φ_i⟩` for sampled data.
pub fn data_coefficients(samples: &SampledFunction, m: u32) -> Result<HaarCoefficients> {
    project_samples(samples, m)
}

/// Galerkin matrix `(A)_{ij} = ∫ Φ_i(s) ∫ k(s, t) Φ_j(t) dt ds` of `K` itself,
/// used by the fixed-level baseline. The outer integral uses 4-point
/// Gauss-Legendre on every dyadic cell.
pub fn galerkin_matrix<K: Kernel>(kernel: &K, m: u32) -> Result<SquareMatrix> {
    check_level(m)?;
    let n = 1usize << m;
    let h = 1.0 / n as f64;
    // rows[a][j] = ∫_{cell a} ⟨k(s, ·), Φ_j⟩ ds
    let mut rows = vec![vec![0.0; n]; n];
    for (a, row) in rows.iter_mut().enumerate() {
        for (s, w) in gauss_legendre4_nodes(a as f64 * h, (a + 1) as f64 * h) {
            let v = slice_coefficients(kernel, s, m, Side::Domain)?;
            for (r, x) in row.iter_mut().zip(v) {
                *r += w * x;
            }
        }
    }
    let mut out = SquareMatrix::zeros(n);
    let mut column = vec![0.0; n];
    for j in 0..n {
        for (c, row) in column.iter_mut().zip(&rows) {
            *c = row[j];
        }
        let coeffs = HaarCoefficients::from_cell_integrals(&column)?;
        for (i, v) in coeffs.values().iter().enumerate() {
            out.set(i, j, *v);
        }
    }
    Ok(out)
}

/// A-priori operator error bounds at level `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    pub level: u32,
    /// `‖T - T^(m)‖ <= c1 / 2^{4m}`
    pub bound_t: f64,
    /// `‖K* - K*_m‖ <= 1 / (2^{2m} 180)`
    pub bound_kstar: f64,
    /// `‖T^(m) - K*_m K‖ <= 17 / (2^{2m} 180)`
    pub bound_mixed: f64,
}

/// The closed-form bounds; the adjoint and mixed constants are those of the
/// Taylor expansion of `e^{-st}` with `|k| <= 1`.
pub fn error_budget<K: Kernel>(kernel: &K, m: u32) -> Result<ErrorBudget> {
    check_level(m)?;
    let c1 = kernel.c1();
    let p2 = libm::ldexp(1.0, 2 * m as i32);
    Ok(ErrorBudget {
        level: m,
        bound_t: c1 / (p2 * p2),
        bound_kstar: 1.0 / (p2 * 180.0),
        bound_mixed: 17.0 / (p2 * 180.0),
    })
}

/// Operators of one level.
#[derive(Debug, Clone)]
pub struct LevelOperators {
    pub domain: GramMatrix,
    /// `None` when the kernel is symmetric and `B_m = A_m`.
    pub range: Option<GramMatrix>,
    pub partition: TaylorPartition,
    rhs_table: Option<Vec<(f64, f64)>>,
}

/// Kernel plus all level operators up to `max_level`, assembled eagerly.
///
/// Immutable after construction, so one instance can serve any number of
/// concurrent runs.
#[derive(Debug, Clone)]
pub struct Discretization<K> {
    kernel: K,
    levels: Vec<LevelOperators>,
}

impl<K: Kernel> Discretization<K> {
    pub fn new(kernel: K, max_level: u32) -> Result<Self> {
        check_level(max_level)?;
        let mut levels = Vec::with_capacity(max_level as usize);
        for m in 1..=max_level {
            let domain = assemble_gram(&kernel, m, Side::Domain)?;
            let range = if kernel.is_symmetric() {
                None
            } else {
                Some(assemble_gram(&kernel, m, Side::Range)?)
            };
            let partition = taylor_partition(m)?;
            levels.push(LevelOperators {
                domain,
                range,
                rhs_table: rhs_table(&kernel, &partition, m),
                partition,
            });
        }
        Ok(Self { kernel, levels })
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn max_level(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn level(&self, m: u32) -> Result<&LevelOperators> {
        check_level(m)?;
        self.levels.get(m as usize - 1).ok_or(Error::LevelTooHigh {
            level: m,
            max: self.max_level(),
        })
    }

    pub fn gram(&self, m: u32, side: Side) -> Result<&GramMatrix> {
        let ops = self.level(m)?;
        Ok(match side {
            Side::Domain => &ops.domain,
            Side::Range => ops.range.as_ref().unwrap_or(&ops.domain),
        })
    }

    pub fn rhs(&self, samples: &SampledFunction, m: u32) -> Result<HaarCoefficients> {
        let ops = self.level(m)?;
        match &ops.rhs_table {
            Some(table) => {
                let n = 1usize << m;
                rhs_cells(&ops.partition, samples, m, |j, _, k| table[j * n + k])
            }
            None => assemble_rhs(&self.kernel, &ops.partition, samples, m),
        }
    }
}
