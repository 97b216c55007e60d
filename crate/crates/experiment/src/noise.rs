//! Seeded additive noise rescaled to an exact discrete `L²` norm.

use std::fmt;
use std::str::FromStr;

use fredholm_dsm::SampledFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDistribution {
    /// i.i.d. uniform on `[-1, 1]` before rescaling.
    #[default]
    Uniform,
    /// i.i.d. standard normal before rescaling.
    Gaussian,
}

impl fmt::Display for NoiseDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseDistribution::Uniform => "uniform",
            NoiseDistribution::Gaussian => "gaussian",
        })
    }
}

impl FromStr for NoiseDistribution {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "gaussian" => Ok(Self::Gaussian),
            _ => Err(ExperimentError::Config(format!(
                "unknown noise distribution `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// `δ_rel` in `[0, 1)`; the absolute bound is `δ_rel ‖f‖`.
    pub rel_level: f64,
    pub seed: u64,
    pub distribution: NoiseDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyData {
    pub samples: SampledFunction,
    pub delta_abs: f64,
}

/// Returns `f + e` with `‖e‖ = δ_rel ‖f‖` in the trapezoid `L²` norm of the
/// sample grid. The generator is seeded from `spec.seed` alone.
pub fn add_noise(exact: &SampledFunction, spec: &NoiseSpec) -> Result<NoisyData> {
    let rel = spec.rel_level;
    if !(0.0..1.0).contains(&rel) {
        return Err(ExperimentError::Config(format!(
            "noise level {rel} outside [0, 1)"
        )));
    }
    let delta_abs = rel * exact.l2_norm();
    if delta_abs == 0.0 {
        return Ok(NoisyData {
            samples: exact.clone(),
            delta_abs,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let raw: Vec<f64> = (0..exact.values().len())
        .map(|_| match spec.distribution {
            NoiseDistribution::Uniform => rng.random_range(-1.0..=1.0),
            NoiseDistribution::Gaussian => rng.sample(StandardNormal),
        })
        .collect();
    let raw = SampledFunction::new(raw)?;
    let scale = delta_abs / raw.l2_norm();
    let values = exact
        .values()
        .iter()
        .zip(raw.values())
        .map(|(f, e)| f + scale * e)
        .collect();
    Ok(NoisyData {
        samples: SampledFunction::new(values)?,
        delta_abs,
    })
}
