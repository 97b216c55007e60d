//! Scalar helpers shared by the quadrature and assembly code.

// 4-point Gauss-Legendre on [-1, 1].
const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Nodes and weights of the 4-point Gauss-Legendre rule mapped to `[a, b]`.
pub(crate) fn gauss_legendre4_nodes(a: f64, b: f64) -> [(f64, f64); 4] {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = [(0.0, 0.0); 4];
    for (slot, (x, w)) in out.iter_mut().zip(GL4_NODES.iter().zip(GL4_WEIGHTS.iter())) {
        *slot = (mid + half * x, half * w);
    }
    out
}

pub(crate) fn gauss_legendre4(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    gauss_legendre4_nodes(a, b)
        .iter()
        .map(|&(x, w)| w * f(x))
        .sum()
}

const SMALL_EXPONENT: f64 = 1e-6;

/// `∫_a^b e^{-c t} dt` for `c >= 0`.
pub(crate) fn exp_integral(c: f64, a: f64, b: f64) -> f64 {
    let w = b - a;
    let x = c * w;
    let scale = libm::exp(-c * a);
    if x < SMALL_EXPONENT {
        scale * w * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0)
    } else {
        scale * (-libm::expm1(-x)) / c
    }
}

/// `∫_a^b t e^{-c t} dt` for `c >= 0`.
pub(crate) fn exp_moment1(c: f64, a: f64, b: f64) -> f64 {
    let w = b - a;
    let x = c * w;
    let scale = libm::exp(-c * a);
    // ∫_0^w τ e^{-cτ} dτ = w² Σ_k (-x)^k / (k! (k + 2))
    let tail = if x < 0.1 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..12 {
            sum += term / (k as f64 + 2.0);
            term *= -x / (k as f64 + 1.0);
        }
        w * w * sum
    } else {
        (-libm::expm1(-x) - x * libm::exp(-x)) / (c * c)
    };
    scale * (a * exp_integral(c, 0.0, w) + tail)
}
