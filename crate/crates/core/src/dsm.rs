//! The adaptive-level DSM iteration, its discrepancy-type stopping rule and
//! the fixed-level baseline.
//!
//! One step of the adaptive scheme at `a_n = q a_{n-1}`, `a_0 = alpha0`:
//!
//! 1. pick the level `m_n` from `a_n` ([`rank_schedule`]);
//! 2. solve `(a_n I + A_{m_n}) ζ = v` and `(a_n I + B_{m_n}) γ = g`;
//! 3. `u_n = q u_{n-1} + (1 - q) ζ`, with `u_{n-1}` zero-padded to level `m_n`;
//! 4. `G_n = q G_{n-1} + (1 - q) a_n ‖γ‖`.
//!
//! The run stops at the first `n` with `G_n <= C δ^ε`.

use alloc::vec::Vec;
use core::fmt;

use crate::assembly::{data_coefficients, galerkin_matrix, Discretization, Side};
use crate::haar::{HaarCoefficients, MIN_SAMPLES_PER_CELL};
use crate::kernel::Kernel;
use crate::matrix::SquareMatrix;
use crate::quadrature::{MAX_LEVEL, TAYLOR_REFINEMENT};
use crate::samples::SampledFunction;
use crate::shifted::ShiftedCholesky;
use crate::{Error, Result};

/// How the discrepancy functional weighs the newest term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiscrepancyForm {
    /// `G_n = q G_{n-1} + (1 - q) a_n ‖γ‖`.
    #[default]
    Formal,
    /// `G_n = q G_{n-1} + a_n ‖γ‖`, without the `(1 - q)` factor.
    Listing,
}

impl DiscrepancyForm {
    pub fn as_str(self) -> &'static str {
        match self {
            DiscrepancyForm::Formal => "formal",
            DiscrepancyForm::Listing => "listing",
        }
    }
}

impl core::str::FromStr for DiscrepancyForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formal" => Ok(Self::Formal),
            "listing" => Ok(Self::Listing),
            _ => Err(Error::InvalidParameter {
                name: "gnm-variant",
                value: f64::NAN,
                reason: "expected `formal` or `listing`",
            }),
        }
    }
}

/// Tunable scalars of the scheme. Ranges are checked on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    alpha0: f64,
    q: f64,
    c: f64,
    eps: f64,
    eta: f64,
    max_iter: usize,
    m_cap: u32,
    discrepancy: DiscrepancyForm,
    stop_at_cap: bool,
}

pub const DEFAULT_MAX_ITER: usize = 50;
pub const DEFAULT_M_CAP: u32 = 6;

fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}

impl SolverConfig {
    /// `alpha0 > 0`, `q ∈ (0, 1)`, `c > 2`, `eps ∈ (0, 1)`, `eta >= 10`.
    pub fn new(alpha0: f64, q: f64, c: f64, eps: f64, eta: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(invalid("alpha0", alpha0, "must be positive"));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid("q", q, "must lie in (0, 1)"));
        }
        if !(c > 2.0 && c.is_finite()) {
            return Err(invalid("C", c, "must exceed 2"));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid("eps", eps, "must lie in (0, 1)"));
        }
        if !(eta >= 10.0 && eta.is_finite()) {
            return Err(invalid("eta", eta, "must be at least 10"));
        }
        Ok(Self {
            alpha0,
            q,
            c,
            eps,
            eta,
            max_iter: DEFAULT_MAX_ITER,
            m_cap: DEFAULT_M_CAP,
            discrepancy: DiscrepancyForm::Formal,
            stop_at_cap: false,
        })
    }

    /// `alpha0 = 1`, `q = 0.25`, `C = 2.01`, `eps = 0.99`, `eta = 10`.
    pub fn paper() -> Self {
        Self::new(1.0, 0.25, 2.01, 0.99, 10.0).expect("preset constants are valid")
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Result<Self> {
        if max_iter == 0 {
            return Err(invalid("max_iter", 0.0, "must be at least 1"));
        }
        self.max_iter = max_iter;
        Ok(self)
    }

    pub fn with_m_cap(mut self, m_cap: u32) -> Result<Self> {
        if m_cap < 1 {
            return Err(Error::LevelTooLow {
                level: m_cap,
                min: 1,
            });
        }
        if m_cap > MAX_LEVEL {
            return Err(Error::LevelTooHigh {
                level: m_cap,
                max: MAX_LEVEL,
            });
        }
        self.m_cap = m_cap;
        Ok(self)
    }

    pub fn with_discrepancy(mut self, form: DiscrepancyForm) -> Self {
        self.discrepancy = form;
        self
    }

    /// Stop with [`StopReason::LevelCap`] as soon as the schedule asks for a
    /// level above the cap, instead of continuing at the cap.
    pub fn with_stop_at_cap(mut self, stop: bool) -> Self {
        self.stop_at_cap = stop;
        self
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn max_iter(&self) -> usize {
        self.max_iter
    }
    pub fn m_cap(&self) -> u32 {
        self.m_cap
    }
    pub fn discrepancy(&self) -> DiscrepancyForm {
        self.discrepancy
    }
    pub fn stop_at_cap(&self) -> bool {
        self.stop_at_cap
    }

    /// `C δ^ε`
    pub fn threshold(&self, delta: f64) -> f64 {
        self.c * libm::pow(delta, self.eps)
    }

    /// Sample-grid size resolving every Taylor partition up to the cap.
    pub fn sample_intervals(&self) -> usize {
        TAYLOR_REFINEMENT << self.m_cap
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::paper()
    }
}

/// `w_j = q^{n-j-1} - q^{n-j}` for `j = 0..n`; the weights sum to `1 - q^n`.
pub fn geometric_weights(n: usize, q: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("n", 0.0, "must be at least 1"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid("q", q, "must lie in (0, 1)"));
    }
    Ok((0..n)
        .map(|j| {
            let k = (n - j - 1) as i32;
            libm::pow(q, k as f64) - libm::pow(q, (k + 1) as f64)
        })
        .collect())
}

/// Level chosen for one regularization parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankChoice {
    /// Level actually used, in `1..=m_cap`.
    pub level: u32,
    /// Maximum of the three ceiling terms before clamping.
    pub raw: i64,
    /// The raw level exceeded the cap.
    pub capped: bool,
}

/// The three ceiling terms making `‖T - T^(m)‖ <= a/2`,
/// `‖T^(m) - K*_m K‖ <= η a²` and `c1 / 2^{2m} <= √a / 2`.
pub fn rank_terms(a: f64, c1: f64, eta: f64) -> [i64; 3] {
    let ln2 = core::f64::consts::LN_2;
    [
        libm::ceil(libm::log(2.0 * c1 / a) / (4.0 * ln2)) as i64,
        libm::ceil(libm::log(17.0 / (180.0 * eta * a * a)) / (2.0 * ln2)) as i64,
        libm::ceil(libm::log(2.0 * c1 / libm::sqrt(a)) / (2.0 * ln2)) as i64,
    ]
}

/// Level `m` for the parameter `a`: the largest of [`rank_terms`], clamped
/// to `[1, m_cap]`.
pub fn rank_schedule(a: f64, c1: f64, eta: f64, m_cap: u32) -> Result<RankChoice> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid("a", a, "must be positive"));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(invalid("c1", c1, "must be positive"));
    }
    if !(eta >= 10.0 && eta.is_finite()) {
        return Err(invalid("eta", eta, "must be at least 10"));
    }
    if m_cap < 1 {
        return Err(Error::LevelTooLow {
            level: m_cap,
            min: 1,
        });
    }
    let raw = rank_terms(a, c1, eta).into_iter().max().unwrap_or(1);
    let level = raw.clamp(1, m_cap as i64) as u32;
    Ok(RankChoice {
        level,
        raw,
        capped: raw > m_cap as i64,
    })
}

/// `G_n` from `G_{n-1}`, `a_n` and `‖γ‖`.
pub fn discrepancy_update(
    g_prev: f64,
    a: f64,
    gamma_norm: f64,
    q: f64,
    form: DiscrepancyForm,
) -> f64 {
    match form {
        DiscrepancyForm::Formal => q * g_prev + (1.0 - q) * a * gamma_norm,
        DiscrepancyForm::Listing => q * g_prev + a * gamma_norm,
    }
}

/// Diagnostics of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    pub a: f64,
    pub level: u32,
    pub raw_level: i64,
    pub capped: bool,
    pub g: f64,
    pub gamma_norm: f64,
}

/// State after `n` iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub n: usize,
    pub a: f64,
    pub level: u32,
    pub u: HaarCoefficients,
    pub g: f64,
    pub history: Vec<IterationRecord>,
}

impl IterationState {
    /// `n = 0`, `a_0 = alpha0`, `u_0 = 0`, `G_0 = 0`.
    pub fn initial(alpha0: f64) -> Self {
        Self {
            n: 0,
            a: alpha0,
            level: 1,
            u: HaarCoefficients::zeros(1).expect("level 1 is valid"),
            g: 0.0,
            history: Vec::new(),
        }
    }
}

/// `u ← q pad(u) + (1 - q) ζ`, `n ← n + 1`. The level of `ζ` becomes the
/// new level and must not be below the current one.
pub fn dsm_step(
    mut state: IterationState,
    zeta: &HaarCoefficients,
    q: f64,
) -> Result<IterationState> {
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid("q", q, "must lie in [0, 1]"));
    }
    let padded = state.u.embed(zeta.level())?;
    let blended = padded
        .values()
        .iter()
        .zip(zeta.values())
        .map(|(u, z)| q * u + (1.0 - q) * z)
        .collect();
    state.u = HaarCoefficients::from_values(zeta.level(), blended)?;
    state.level = zeta.level();
    state.n += 1;
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    DiscrepancyMet,
    /// `G_1` was already below the threshold.
    InitialBelowThreshold,
    MaxIter,
    /// The schedule exceeded `m_cap` and the config asked to stop there.
    LevelCap,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::DiscrepancyMet => "discrepancy_met",
            StopReason::InitialBelowThreshold => "initial_below_threshold",
            StopReason::MaxIter => "max_iter",
            StopReason::LevelCap => "m_cap",
        }
    }

    /// Whether the stopping rule was satisfied.
    pub fn is_success(self) -> bool {
        matches!(
            self,
            StopReason::DiscrepancyMet | StopReason::InitialBelowThreshold
        )
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for StopReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "discrepancy_met" => Self::DiscrepancyMet,
            "initial_below_threshold" => Self::InitialBelowThreshold,
            "max_iter" => Self::MaxIter,
            "m_cap" => Self::LevelCap,
            _ => {
                return Err(invalid("stop_reason", f64::NAN, "unknown stop reason"));
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub solution: HaarCoefficients,
    pub n_delta: usize,
    pub m_final: u32,
    pub g_final: f64,
    pub a_final: f64,
    pub delta: f64,
    pub threshold: f64,
    pub stop_reason: StopReason,
    pub trace: Vec<IterationRecord>,
}

/// Per-level data vectors `(v, g)`, computed once per level.
type LevelData = Option<(HaarCoefficients, HaarCoefficients)>;

/// Step-by-step driver of the adaptive scheme without a stopping rule.
pub struct AdaptiveRun<'a, K> {
    disc: &'a Discretization<K>,
    data: &'a SampledFunction,
    config: SolverConfig,
    state: IterationState,
    level_data: Vec<LevelData>,
}

impl<'a, K: Kernel> AdaptiveRun<'a, K> {
    pub fn new(
        disc: &'a Discretization<K>,
        data: &'a SampledFunction,
        config: &SolverConfig,
    ) -> Result<Self> {
        if config.m_cap > disc.max_level() {
            return Err(Error::LevelTooHigh {
                level: config.m_cap,
                max: disc.max_level(),
            });
        }
        // the finest partition and the finest Haar cells must be resolved
        data.intervals_per_cell(TAYLOR_REFINEMENT << config.m_cap, 1)?;
        data.intervals_per_cell(1 << config.m_cap, MIN_SAMPLES_PER_CELL)?;
        Ok(Self {
            disc,
            data,
            config: *config,
            state: IterationState::initial(config.alpha0),
            level_data: alloc::vec![None; config.m_cap as usize + 1],
        })
    }

    pub fn state(&self) -> &IterationState {
        &self.state
    }

    pub fn into_state(self) -> IterationState {
        self.state
    }

    /// `a_{n+1}` and its level.
    pub fn next_choice(&self) -> Result<(f64, RankChoice)> {
        let a = self.config.q * self.state.a;
        let choice = rank_schedule(
            a,
            self.disc.kernel().c1(),
            self.config.eta,
            self.config.m_cap,
        )?;
        Ok((a, choice))
    }

    fn vectors(&mut self, m: u32) -> Result<(HaarCoefficients, HaarCoefficients)> {
        let slot = &mut self.level_data[m as usize];
        if slot.is_none() {
            let v = self.disc.rhs(self.data, m)?;
            let g = data_coefficients(self.data, m)?;
            *slot = Some((v, g));
        }
        Ok(slot.clone().expect("filled above"))
    }

    /// Runs iteration `n + 1` and returns its record.
    pub fn step(&mut self) -> Result<IterationRecord> {
        let (a, choice) = self.next_choice()?;
        let m = choice.level;
        let (v, g) = self.vectors(m)?;

        let domain = self.disc.gram(m, Side::Domain)?;
        let range = self.disc.gram(m, Side::Range)?;
        let t_factor = ShiftedCholesky::factor(domain.matrix(), a)?;
        let zeta = HaarCoefficients::from_values(m, t_factor.solve(v.values())?)?;
        let gamma = if core::ptr::eq(domain, range) {
            t_factor.solve(g.values())?
        } else {
            ShiftedCholesky::factor(range.matrix(), a)?.solve(g.values())?
        };
        let gamma_norm = libm::sqrt(gamma.iter().map(|x| x * x).sum());

        let q = self.config.q;
        let state = core::mem::replace(&mut self.state, IterationState::initial(0.0));
        let mut state = dsm_step(state, &zeta, q)?;
        state.a = a;
        state.g = discrepancy_update(state.g, a, gamma_norm, q, self.config.discrepancy);
        let record = IterationRecord {
            n: state.n,
            a,
            level: m,
            raw_level: choice.raw,
            capped: choice.capped,
            g: state.g,
            gamma_norm,
        };
        state.history.push(record);
        self.state = state;
        Ok(record)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", delta, "must be positive"));
    }
    Ok(())
}

fn finish(state: IterationState, delta: f64, threshold: f64, reason: StopReason) -> SolveOutcome {
    SolveOutcome {
        n_delta: state.n,
        m_final: state.level,
        g_final: state.g,
        a_final: state.a,
        delta,
        threshold,
        stop_reason: reason,
        solution: state.u,
        trace: state.history,
    }
}

/// Adaptive-level scheme with the discrepancy stopping rule; `delta` is the
/// absolute `L²` noise bound.
pub fn run_adaptive<K: Kernel>(
    disc: &Discretization<K>,
    data: &SampledFunction,
    delta: f64,
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    check_delta(delta)?;
    let threshold = config.threshold(delta);
    let mut run = AdaptiveRun::new(disc, data, config)?;
    let mut reason = StopReason::MaxIter;
    for n in 1..=config.max_iter {
        if config.stop_at_cap && run.next_choice()?.1.capped {
            reason = StopReason::LevelCap;
            break;
        }
        let record = run.step()?;
        if record.g <= threshold {
            reason = if n == 1 {
                StopReason::InitialBelowThreshold
            } else {
                StopReason::DiscrepancyMet
            };
            break;
        }
    }
    Ok(finish(run.into_state(), delta, threshold, reason))
}

/// `u_n = Σ_{j<n} w_j (a_{j+1} I + A_{m_{j+1}})^{-1} v_{m_{j+1}}`, evaluated
/// directly from the level schedule as an independent check of the recursion.
pub fn closed_form_iterate<K: Kernel>(
    disc: &Discretization<K>,
    data: &SampledFunction,
    config: &SolverConfig,
    schedule: &[u32],
) -> Result<HaarCoefficients> {
    let Some(&top) = schedule.last() else {
        return HaarCoefficients::zeros(1);
    };
    if let Some(w) = schedule.windows(2).find(|w| w[1] < w[0]) {
        return Err(Error::LevelShrink {
            previous: w[0],
            requested: w[1],
        });
    }
    let weights = geometric_weights(schedule.len(), config.q)?;
    let mut total = alloc::vec![0.0; 1usize << top];
    let mut a = config.alpha0;
    for (&m, w) in schedule.iter().zip(weights) {
        a *= config.q;
        let v = disc.rhs(data, m)?;
        let z =
            ShiftedCholesky::factor(disc.gram(m, Side::Domain)?.matrix(), a)?.solve(v.values())?;
        for (t, zi) in total.iter_mut().zip(z) {
            *t += w * zi;
        }
    }
    HaarCoefficients::from_values(top, total)
}

/// Fixed-level baseline: `u_n = q u_{n-1} + (1 - q) (a_n I + AᵀA)^{-1} Aᵀ g`,
/// with `A` the Haar-Galerkin matrix of `K` and `g = ⟨f_δ, Φ_i⟩`.
#[derive(Debug, Clone)]
pub struct FixedScheme {
    level: u32,
    galerkin: SquareMatrix,
    normal: SquareMatrix,
    co_normal: SquareMatrix,
}

impl FixedScheme {
    pub fn new<K: Kernel>(kernel: &K, m: u32) -> Result<Self> {
        let galerkin = galerkin_matrix(kernel, m)?;
        let normal = galerkin.gram();
        let co_normal = galerkin.transpose().gram();
        Ok(Self {
            level: m,
            galerkin,
            normal,
            co_normal,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn galerkin(&self) -> &SquareMatrix {
        &self.galerkin
    }
}

pub fn run_fixed(
    scheme: &FixedScheme,
    data: &SampledFunction,
    delta: f64,
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    check_delta(delta)?;
    let threshold = config.threshold(delta);
    let m = scheme.level;
    let g = data_coefficients(data, m)?;
    let rhs = scheme.galerkin.mul_transpose_vec(g.values())?;
    let q = config.q;

    let mut state = IterationState::initial(config.alpha0);
    let mut reason = StopReason::MaxIter;
    for n in 1..=config.max_iter {
        let a = q * state.a;
        let zeta = ShiftedCholesky::factor(&scheme.normal, a)?.solve(&rhs)?;
        let gamma = ShiftedCholesky::factor(&scheme.co_normal, a)?.solve(g.values())?;
        let gamma_norm = libm::sqrt(gamma.iter().map(|x| x * x).sum());
        state = dsm_step(state, &HaarCoefficients::from_values(m, zeta)?, q)?;
        state.a = a;
        state.g = discrepancy_update(state.g, a, gamma_norm, q, config.discrepancy);
        state.history.push(IterationRecord {
            n,
            a,
            level: m,
            raw_level: m as i64,
            capped: false,
            g: state.g,
            gamma_norm,
        });
        if state.g <= threshold {
            reason = if n == 1 {
                StopReason::InitialBelowThreshold
            } else {
                StopReason::DiscrepancyMet
            };
            break;
        }
    }
    Ok(finish(state, delta, threshold, reason))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ExpKernel;
    use crate::problem::laplace_rhs;

    #[test]
    fn config_ranges() {
        assert!(SolverConfig::new(0.0, 0.25, 2.01, 0.99, 10.0).is_err());
        assert!(SolverConfig::new(1.0, 1.0, 2.01, 0.99, 10.0).is_err());
        assert!(SolverConfig::new(1.0, 0.25, 2.0, 0.99, 10.0).is_err());
        assert!(SolverConfig::new(1.0, 0.25, 2.01, 1.0, 10.0).is_err());
        assert!(SolverConfig::new(1.0, 0.25, 2.01, 0.99, 9.0).is_err());
        assert!(SolverConfig::paper().with_max_iter(0).is_err());
        assert!(SolverConfig::paper().with_m_cap(0).is_err());
        let p = SolverConfig::paper();
        assert_eq!(
            (p.alpha0(), p.q(), p.c(), p.eps(), p.eta()),
            (1.0, 0.25, 2.01, 0.99, 10.0)
        );
    }

    #[test]
    fn weight_examples() {
        let w = geometric_weights(2, 0.25).unwrap();
        assert_eq!(w, alloc::vec![0.1875, 0.75]);
        assert_eq!(w.iter().sum::<f64>(), 0.9375);
        assert_eq!(geometric_weights(1, 0.5).unwrap(), alloc::vec![0.5]);
        let s: f64 = geometric_weights(10, 0.25).unwrap().iter().sum();
        assert!((s - (1.0 - libm::pow(0.25, 10.0))).abs() < 1e-15);
        assert!(geometric_weights(0, 0.5).is_err());
        assert!(geometric_weights(3, 1.5).is_err());
    }

    #[test]
    fn rank_examples() {
        let c1 = 16.0 / 180.0;
        assert_eq!(rank_terms(0.25, c1, 10.0), [0, -1, 0]);
        let first = rank_schedule(0.25, c1, 10.0, 20).unwrap();
        assert_eq!((first.level, first.raw, first.capped), (1, 0, false));
        let a4 = libm::pow(0.25, 4.0);
        assert_eq!(rank_terms(a4, c1, 10.0), [2, 5, 1]);
        assert_eq!(rank_schedule(a4, c1, 10.0, 20).unwrap().level, 5);
        let capped = rank_schedule(a4, c1, 10.0, 3).unwrap();
        assert_eq!((capped.level, capped.capped), (3, true));
        let mut prev = 0;
        let mut a = 1.0;
        for _ in 0..40 {
            a *= 0.5;
            let m = rank_schedule(a, c1, 10.0, 20).unwrap().level;
            assert!(m >= prev);
            prev = m;
        }
        assert!(rank_schedule(0.0, c1, 10.0, 6).is_err());
        assert!(rank_schedule(0.1, c1, 5.0, 6).is_err());
    }

    #[test]
    fn step_examples() {
        let z = HaarCoefficients::from_values(1, alloc::vec![2.0, -4.0]).unwrap();
        let s = dsm_step(IterationState::initial(1.0), &z, 0.25).unwrap();
        assert_eq!(s.u.values(), &[1.5, -3.0]);
        assert_eq!(s.n, 1);
        let same = dsm_step(s.clone(), &s.u.clone(), 0.25).unwrap();
        assert_eq!(same.u, s.u);
        let replaced = dsm_step(s.clone(), &z, 0.0).unwrap();
        assert_eq!(replaced.u, z);
        let coarse = HaarCoefficients::zeros(0).unwrap();
        assert!(matches!(
            dsm_step(s, &coarse, 0.25),
            Err(Error::LevelShrink { .. })
        ));
    }

    #[test]
    fn discrepancy_examples() {
        let g = discrepancy_update(0.0, 0.25, 2.0, 0.25, DiscrepancyForm::Formal);
        assert!((g - 0.375).abs() < 1e-16);
        assert_eq!(
            discrepancy_update(0.8, 0.1, 0.0, 0.25, DiscrepancyForm::Formal),
            0.2
        );
        assert!(
            (discrepancy_update(0.0, 0.25, 2.0, 0.25, DiscrepancyForm::Listing) - 0.5).abs()
                < 1e-16
        );
        let mut g = 0.0;
        let mut a = 1.0;
        for _ in 0..80 {
            a *= 0.25;
            g = discrepancy_update(g, a, 3.0, 0.25, DiscrepancyForm::Formal);
        }
        assert!(g < 1e-30);
    }

    fn exact_samples(config: &SolverConfig) -> SampledFunction {
        SampledFunction::from_fn(config.sample_intervals(), laplace_rhs)
    }

    #[test]
    fn recursion_matches_closed_form() {
        let config = SolverConfig::paper().with_m_cap(4).unwrap();
        let disc = Discretization::new(ExpKernel, 4).unwrap();
        let data = exact_samples(&config);
        let mut run = AdaptiveRun::new(&disc, &data, &config).unwrap();
        let mut schedule = Vec::new();
        for _ in 0..10 {
            schedule.push(run.step().unwrap().level);
            let closed = closed_form_iterate(&disc, &data, &config, &schedule).unwrap();
            let u = &run.state().u;
            assert_eq!(u.level(), closed.level());
            for (a, b) in u.values().iter().zip(closed.values()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn closed_form_of_zero_data_is_zero() {
        let config = SolverConfig::paper().with_m_cap(3).unwrap();
        let disc = Discretization::new(ExpKernel, 3).unwrap();
        let zero = SampledFunction::from_fn(config.sample_intervals(), |_| 0.0);
        let u = closed_form_iterate(&disc, &zero, &config, &[1, 1, 3, 3]).unwrap();
        assert!(u.values().iter().all(|v| *v == 0.0));
        assert!(closed_form_iterate(&disc, &zero, &config, &[3, 1]).is_err());
    }

    #[test]
    fn single_step_is_scaled_regularized_solution() {
        let config = SolverConfig::paper().with_m_cap(2).unwrap();
        let disc = Discretization::new(ExpKernel, 2).unwrap();
        let data = exact_samples(&config);
        let mut run = AdaptiveRun::new(&disc, &data, &config).unwrap();
        run.step().unwrap();
        let v = disc.rhs(&data, 1).unwrap();
        let z = ShiftedCholesky::factor(disc.gram(1, Side::Domain).unwrap().matrix(), 0.25)
            .unwrap()
            .solve(v.values())
            .unwrap();
        for (u, z) in run.state().u.values().iter().zip(z) {
            assert_eq!(*u, 0.75 * z);
        }
    }

    #[test]
    fn initial_below_threshold_is_reported() {
        let config = SolverConfig::paper().with_m_cap(2).unwrap();
        let disc = Discretization::new(ExpKernel, 2).unwrap();
        let data = exact_samples(&config);
        // huge delta makes C δ^ε exceed G_1
        let out = run_adaptive(&disc, &data, 10.0, &config).unwrap();
        assert_eq!(out.stop_reason, StopReason::InitialBelowThreshold);
        assert_eq!(out.n_delta, 1);
    }

    #[test]
    fn max_iter_and_cap_reasons() {
        let config = SolverConfig::paper()
            .with_m_cap(2)
            .unwrap()
            .with_max_iter(3)
            .unwrap();
        let disc = Discretization::new(ExpKernel, 2).unwrap();
        let data = exact_samples(&config);
        let out = run_adaptive(&disc, &data, 1e-12, &config).unwrap();
        assert_eq!(out.stop_reason, StopReason::MaxIter);
        assert_eq!(out.trace.len(), 3);
        assert!(out.trace[2].capped);

        let stop = config.with_stop_at_cap(true);
        let out = run_adaptive(&disc, &data, 1e-12, &stop).unwrap();
        assert_eq!(out.stop_reason, StopReason::LevelCap);
        assert!(out.trace.iter().all(|r| !r.capped));

        assert!(run_adaptive(&disc, &data, 0.0, &config).is_err());
        let too_big = SolverConfig::paper().with_m_cap(3).unwrap();
        assert!(run_adaptive(&disc, &data, 0.01, &too_big).is_err());
    }

    #[test]
    fn fixed_scheme_converges_on_clean_data() {
        let config = SolverConfig::paper().with_m_cap(4).unwrap();
        let data = exact_samples(&config);
        let scheme = FixedScheme::new(&ExpKernel, 4).unwrap();
        let out = run_fixed(&scheme, &data, 1e-3, &config).unwrap();
        assert_eq!(out.stop_reason, StopReason::DiscrepancyMet);
        assert_eq!(out.m_final, 4);
        let err = crate::problem::avg_error(&out.solution, |t| t);
        assert!(err < 0.1, "avg {err}");
    }

    #[test]
    fn stop_reason_names_round_trip() {
        for r in [
            StopReason::DiscrepancyMet,
            StopReason::InitialBelowThreshold,
            StopReason::MaxIter,
            StopReason::LevelCap,
        ] {
            assert_eq!(r.as_str().parse::<StopReason>().unwrap(), r);
        }
        assert!("nope".parse::<StopReason>().is_err());
        assert_eq!(
            "listing".parse::<DiscrepancyForm>().unwrap(),
            DiscrepancyForm::Listing
        );
    }
}
