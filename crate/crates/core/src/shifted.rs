//! Dense Cholesky solves of `(aI + A) x = b` for symmetric positive
//! semidefinite `A` and `a > 0`.

use alloc::vec::Vec;

use crate::matrix::SquareMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ShiftedSystem<'a> {
    pub matrix: &'a SquareMatrix,
    pub shift: f64,
    pub rhs: &'a [f64],
}

/// Lower-triangular factor `L` with `L Lᵀ = aI + A`.
#[derive(Debug, Clone)]
pub struct ShiftedCholesky {
    dim: usize,
    shift: f64,
    lower: Vec<f64>,
}

impl ShiftedCholesky {
    /// Factors `shift * I + matrix`; only the lower triangle of `matrix` is read.
    pub fn factor(matrix: &SquareMatrix, shift: f64) -> Result<Self> {
        if !(shift.is_finite() && shift > 0.0) {
            return Err(Error::InvalidParameter {
                name: "shift",
                value: shift,
                reason: "must be positive and finite",
            });
        }
        let n = matrix.dim();
        let mut l = alloc::vec![0.0; n * n];
        for j in 0..n {
            let mut d = matrix.get(j, j) + shift;
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let djj = libm::sqrt(d);
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = matrix.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self {
            dim: n,
            shift,
            lower: l,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: rhs.len(),
            });
        }
        let l = &self.lower;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k * n + i] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        Ok(y)
    }
}

/// Solves one shifted system with a fresh factorization.
pub fn solve_shifted(system: &ShiftedSystem<'_>) -> Result<Vec<f64>> {
    ShiftedCholesky::factor(system.matrix, system.shift)?.solve(system.rhs)
}
