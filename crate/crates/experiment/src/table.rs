//! Table runs over noise levels, seeds and schemes, with CSV output and a
//! median summary.

use std::fmt::{self, Write as _};
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use fredholm_dsm::{
    avg_error, run_adaptive, run_fixed, Discretization, ExpKernel, FixedScheme, SampledFunction,
    SolveOutcome, SolverConfig, StopReason,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::noise::{add_noise, NoiseDistribution, NoiseSpec};
use crate::{ExperimentError, Result};

pub const PAPER_NOISE_LEVELS: [f64; 4] = [0.05, 0.01, 0.005, 0.0005];
pub const PAPER_FIXED_M: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Adaptive,
    Fixed,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Scheme::Adaptive => "adaptive",
            Scheme::Fixed => "fixed",
        })
    }
}

impl FromStr for Scheme {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(Self::Adaptive),
            "fixed" => Ok(Self::Fixed),
            _ => Err(ExperimentError::Config(format!("unknown scheme `{s}`"))),
        }
    }
}

mod stop_reason_str {
    use fredholm_dsm::StopReason;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &StopReason, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(r.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<StopReason, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// One CSV line: a single scheme on a single noise realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub delta_rel: f64,
    pub scheme: Scheme,
    pub seed: u64,
    pub avg: f64,
    pub m_final: u32,
    pub n_iters: usize,
    #[serde(rename = "G_final")]
    pub g_final: f64,
    pub wall_seconds: f64,
    #[serde(with = "stop_reason_str")]
    pub stop_reason: StopReason,
}

/// A row together with the data it was computed from.
#[derive(Debug, Clone)]
pub struct RowRun {
    pub row: ExperimentRow,
    pub delta_abs: f64,
    pub outcome: SolveOutcome,
}

#[derive(Debug, Clone)]
pub struct TableSpec {
    pub config: SolverConfig,
    pub levels: Vec<f64>,
    pub seeds: Vec<u64>,
    pub schemes: Vec<Scheme>,
    pub fixed_m: u32,
    pub distribution: NoiseDistribution,
}

impl TableSpec {
    /// The `paper` preset: [`SolverConfig::paper`], the four noise levels of
    /// [`PAPER_NOISE_LEVELS`], seeds `0..seeds`, both schemes and fixed level 4.
    pub fn paper(seeds: u64) -> Self {
        Self {
            config: SolverConfig::paper(),
            levels: PAPER_NOISE_LEVELS.to_vec(),
            seeds: (0..seeds).collect(),
            schemes: vec![Scheme::Adaptive, Scheme::Fixed],
            fixed_m: PAPER_FIXED_M,
            distribution: NoiseDistribution::Uniform,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(l) = self.levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return Err(ExperimentError::Config(format!(
                "noise level {l} outside (0, 1)"
            )));
        }
        if self.schemes.contains(&Scheme::Fixed)
            && !(1..=self.config.m_cap()).contains(&self.fixed_m)
        {
            return Err(ExperimentError::Config(format!(
                "fixed level {} outside [1, m_cap = {}]",
                self.fixed_m,
                self.config.m_cap()
            )));
        }
        Ok(())
    }
}

/// Shared, immutable inputs of every row.
struct Setup {
    disc: Discretization<ExpKernel>,
    fixed: Option<FixedScheme>,
    exact: SampledFunction,
}

impl Setup {
    fn new(spec: &TableSpec) -> Result<Self> {
        let config = &spec.config;
        let fixed = if spec.schemes.contains(&Scheme::Fixed) {
            Some(FixedScheme::new(&ExpKernel, spec.fixed_m)?)
        } else {
            None
        };
        Ok(Self {
            disc: Discretization::new(ExpKernel, config.m_cap())?,
            fixed,
            exact: SampledFunction::from_fn(config.sample_intervals(), fredholm_dsm::laplace_rhs),
        })
    }
}

/// Runs every `(level, seed)` pair, in parallel across pairs. Both schemes
/// of a pair see the same noise realization. Rows come back in
/// level-major, then seed, then scheme order.
pub fn run_table(spec: &TableSpec) -> Result<Vec<RowRun>> {
    spec.validate()?;
    let setup = Setup::new(spec)?;
    let pairs: Vec<(f64, u64)> = spec
        .levels
        .iter()
        .flat_map(|&l| spec.seeds.iter().map(move |&s| (l, s)))
        .collect();
    let nested: Vec<Vec<RowRun>> = pairs
        .par_iter()
        .map(|&(level, seed)| {
            let noise = NoiseSpec {
                rel_level: level,
                seed,
                distribution: spec.distribution,
            };
            spec.schemes
                .iter()
                .map(|&scheme| run_pair(&setup, &spec.config, &noise, scheme))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// A single row outside a table: builds its own operators.
pub fn run_row(
    config: &SolverConfig,
    noise: &NoiseSpec,
    scheme: Scheme,
    fixed_m: u32,
) -> Result<RowRun> {
    let spec = TableSpec {
        config: *config,
        levels: vec![noise.rel_level],
        seeds: vec![noise.seed],
        schemes: vec![scheme],
        fixed_m,
        distribution: noise.distribution,
    };
    spec.validate()?;
    run_pair(&Setup::new(&spec)?, config, noise, scheme)
}

fn run_pair(
    setup: &Setup,
    config: &SolverConfig,
    noise: &NoiseSpec,
    scheme: Scheme,
) -> Result<RowRun> {
    let data = add_noise(&setup.exact, noise)?;
    let start = Instant::now();
    let outcome = match scheme {
        Scheme::Adaptive => run_adaptive(&setup.disc, &data.samples, data.delta_abs, config)?,
        Scheme::Fixed => {
            let fixed = setup
                .fixed
                .as_ref()
                .ok_or_else(|| ExperimentError::Config("fixed scheme not prepared".into()))?;
            run_fixed(fixed, &data.samples, data.delta_abs, config)?
        }
    };
    let wall_seconds = start.elapsed().as_secs_f64();
    let row = ExperimentRow {
        delta_rel: noise.rel_level,
        scheme,
        seed: noise.seed,
        avg: avg_error(&outcome.solution, |t| t),
        m_final: outcome.m_final,
        n_iters: outcome.n_delta,
        g_final: outcome.g_final,
        wall_seconds,
        stop_reason: outcome.stop_reason,
    };
    Ok(RowRun {
        row,
        delta_abs: data.delta_abs,
        outcome,
    })
}

/// Median of a non-empty sample; the mean of the two middle values for
/// even sizes.
pub fn median(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Medians over seeds for one `(delta_rel, scheme)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub delta_rel: f64,
    pub scheme: Scheme,
    pub runs: usize,
    pub avg: f64,
    pub m_final: f64,
    pub n_iters: f64,
    pub wall_seconds: f64,
    /// Rows whose stopping rule was not satisfied.
    pub unmet: usize,
}

/// Groups rows by `(delta_rel, scheme)` in order of first appearance.
pub fn summarize(rows: &[ExperimentRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(f64, Scheme)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.delta_rel, r.scheme)) {
            keys.push((r.delta_rel, r.scheme));
        }
    }
    keys.into_iter()
        .map(|(delta_rel, scheme)| {
            let group: Vec<&ExperimentRow> = rows
                .iter()
                .filter(|r| r.delta_rel == delta_rel && r.scheme == scheme)
                .collect();
            SummaryRow {
                delta_rel,
                scheme,
                runs: group.len(),
                avg: median(group.iter().map(|r| r.avg)),
                m_final: median(group.iter().map(|r| r.m_final as f64)),
                n_iters: median(group.iter().map(|r| r.n_iters as f64)),
                wall_seconds: median(group.iter().map(|r| r.wall_seconds)),
                unmet: group.iter().filter(|r| !r.stop_reason.is_success()).count(),
            }
        })
        .collect()
}

impl SummaryRow {
    pub fn format_table(rows: &[SummaryRow]) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>8}  {:<8}  {:>4}  {:>8}  {:>7}  {:>7}  {:>10}  {:>5}",
            "delta", "scheme", "runs", "Avg", "m_final", "n_iters", "wall_s", "unmet"
        );
        for r in rows {
            let _ = writeln!(
                out,
                "{:>7.3}%  {:<8}  {:>4}  {:>8.4}  {:>7.1}  {:>7.1}  {:>10.2e}  {:>5}",
                100.0 * r.delta_rel,
                r.scheme.to_string(),
                r.runs,
                r.avg,
                r.m_final,
                r.n_iters,
                r.wall_seconds,
                r.unmet
            );
        }
        out
    }
}

pub fn write_csv<W: Write>(writer: W, rows: &[ExperimentRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<ExperimentRow>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(ExperimentError::from))
        .collect()
}

#[derive(Serialize)]
struct TraceLine {
    n: usize,
    a: f64,
    level: u32,
    raw_level: i64,
    capped: bool,
    #[serde(rename = "G")]
    g: f64,
    gamma_norm: f64,
    threshold: f64,
}

/// Per-iteration trace of one run: `n,a,level,raw_level,capped,G,gamma_norm,threshold`.
pub fn write_trace<W: Write>(writer: W, outcome: &SolveOutcome) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in &outcome.trace {
        w.serialize(TraceLine {
            n: r.n,
            a: r.a,
            level: r.level,
            raw_level: r.raw_level,
            capped: r.capped,
            g: r.g,
            gamma_norm: r.gamma_norm,
            threshold: outcome.threshold,
        })?;
    }
    w.flush()?;
    Ok(())
}
