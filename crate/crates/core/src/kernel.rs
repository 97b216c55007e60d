//! Integral kernels `k(s, t)` on `[0, 1]²`.

use crate::math::{exp_integral, exp_moment1, gauss_legendre4};
use crate::{Error, Result};

/// A real kernel defining `(Ku)(s) = ∫ k(s, t) u(t) dt`.
///
/// The cell-integral methods default to 4-point Gauss-Legendre; kernels with
/// closed-form antiderivatives override them.
pub trait Kernel {
    fn eval(&self, s: f64, t: f64) -> f64;

    /// `∂k/∂s (s, t)`, used by the Taylor approximation of the adjoint.
    fn ds(&self, s: f64, t: f64) -> f64;

    fn is_symmetric(&self) -> bool;

    /// Constant `c1` of the Simpson error bound `c1 / 2^{4m}`, i.e.
    /// `max |∂⁴_s k(s,x) k(s,z)| / 180`.
    fn c1(&self) -> f64;

    /// Upper bound on `|k|` over the unit square.
    fn sup_bound(&self) -> f64;

    /// `∫_a^b k(s, t) dt`
    fn integrate_t(&self, s: f64, a: f64, b: f64) -> f64 {
        gauss_legendre4(|t| self.eval(s, t), a, b)
    }

    /// `∫_a^b k(x, t) dx`
    fn integrate_s(&self, t: f64, a: f64, b: f64) -> f64 {
        gauss_legendre4(|x| self.eval(x, t), a, b)
    }

    /// `∫_a^b ∂k/∂s (s, t) dt`
    fn integrate_ds_t(&self, s: f64, a: f64, b: f64) -> f64 {
        gauss_legendre4(|t| self.ds(s, t), a, b)
    }
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn eval(&self, s: f64, t: f64) -> f64 {
        (**self).eval(s, t)
    }
    fn ds(&self, s: f64, t: f64) -> f64 {
        (**self).ds(s, t)
    }
    fn is_symmetric(&self) -> bool {
        (**self).is_symmetric()
    }
    fn c1(&self) -> f64 {
        (**self).c1()
    }
    fn sup_bound(&self) -> f64 {
        (**self).sup_bound()
    }
    fn integrate_t(&self, s: f64, a: f64, b: f64) -> f64 {
        (**self).integrate_t(s, a, b)
    }
    fn integrate_s(&self, t: f64, a: f64, b: f64) -> f64 {
        (**self).integrate_s(t, a, b)
    }
    fn integrate_ds_t(&self, s: f64, a: f64, b: f64) -> f64 {
        (**self).integrate_ds_t(s, a, b)
    }
}

/// The Laplace kernel `k(s, t) = e^{-st}`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExpKernel;

impl Kernel for ExpKernel {
    fn eval(&self, s: f64, t: f64) -> f64 {
        libm::exp(-s * t)
    }

    fn ds(&self, s: f64, t: f64) -> f64 {
        -t * libm::exp(-s * t)
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    // ∂⁴_s e^{-s(x+z)} = (x+z)⁴ e^{-s(x+z)} <= 16
    fn c1(&self) -> f64 {
        16.0 / 180.0
    }

    fn sup_bound(&self) -> f64 {
        1.0
    }

    fn integrate_t(&self, s: f64, a: f64, b: f64) -> f64 {
        exp_integral(s, a, b)
    }

    fn integrate_s(&self, t: f64, a: f64, b: f64) -> f64 {
        exp_integral(t, a, b)
    }

    fn integrate_ds_t(&self, s: f64, a: f64, b: f64) -> f64 {
        -exp_moment1(s, a, b)
    }
}

/// A kernel given by closures, with caller-supplied constants.
#[derive(Debug, Clone, Copy)]
pub struct FnKernel<F, D> {
    pub eval: F,
    pub ds: D,
    pub symmetric: bool,
    pub c1: f64,
    pub sup_bound: f64,
}

impl<F, D> Kernel for FnKernel<F, D>
where
    F: Fn(f64, f64) -> f64,
    D: Fn(f64, f64) -> f64,
{
    fn eval(&self, s: f64, t: f64) -> f64 {
        (self.eval)(s, t)
    }
    fn ds(&self, s: f64, t: f64) -> f64 {
        (self.ds)(s, t)
    }
    fn is_symmetric(&self) -> bool {
        self.symmetric
    }
    fn c1(&self) -> f64 {
        self.c1
    }
    fn sup_bound(&self) -> f64 {
        self.sup_bound
    }
}

/// Checks the declared kernel constants on a `(samples + 1)²` grid: the
/// symmetry flag to `1e-14`, `c1 > 0`, and `sup_bound` against the sampled
/// maximum of `|k|`.
pub fn validate_kernel<K: Kernel>(kernel: &K, samples: usize) -> Result<()> {
    let c1 = kernel.c1();
    if !(c1.is_finite() && c1 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "c1",
            value: c1,
            reason: "must be positive",
        });
    }
    let n = samples.max(1);
    let mut max_abs = 0.0f64;
    for i in 0..=n {
        let s = i as f64 / n as f64;
        for j in 0..=n {
            let t = j as f64 / n as f64;
            let v = kernel.eval(s, t);
            if !v.is_finite() {
                return Err(Error::NonFiniteKernel { s, t });
            }
            max_abs = max_abs.max(libm::fabs(v));
            if kernel.is_symmetric() && libm::fabs(v - kernel.eval(t, s)) > 1e-14 {
                return Err(Error::InvalidParameter {
                    name: "symmetric",
                    value: libm::fabs(v - kernel.eval(t, s)),
                    reason: "kernel declared symmetric but k(s,t) != k(t,s)",
                });
            }
        }
    }
    if kernel.sup_bound() < max_abs {
        return Err(Error::InvalidParameter {
            name: "sup_bound",
            value: kernel.sup_bound(),
            reason: "below sampled maximum of |k|",
        });
    }
    Ok(())
}
