use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DiscountFunction, Instance};
use crate::rng::{stream, Purpose};

/// Which policy drives a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Staged elimination with few switches.
    Low,
    /// UCB1 over ranking policies.
    Ucb,
    Greedy,
    /// The best ranking policy, known in advance.
    Ghost,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Low => "low",
            Algorithm::Ucb => "ucb",
            Algorithm::Greedy => "greedy",
            Algorithm::Ghost => "ghost",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(Algorithm::Low),
            "ucb" => Ok(Algorithm::Ucb),
            "greedy" => Ok(Algorithm::Greedy),
            "ghost" => Ok(Algorithm::Ghost),
            _ => Err(Error::InvalidParameter(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Where a run's instance comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSource {
    Fixed {
        instance: Instance,
    },
    /// Fixed baselines and discount; each seed draws every delay uniformly
    /// from `1..=max_delay` on its instance stream.
    RandomDelays {
        baselines: Vec<f64>,
        discount: DiscountFunction,
        max_delay: usize,
    },
}

impl InstanceSource {
    /// Instance used by the runs with `seed`.
    pub fn resolve(&self, seed: u64) -> Result<Instance> {
        match self {
            InstanceSource::Fixed { instance } => Ok(instance.clone()),
            InstanceSource::RandomDelays { baselines, discount, max_delay } => {
                if *max_delay == 0 {
                    return Err(Error::InvalidParameter("max_delay must be at least 1".into()));
                }
                let mut rng = stream(seed, 0, Purpose::Instance);
                let delays: Vec<usize> = baselines.iter().map(|_| rng.gen_range(1..=*max_delay)).collect();
                Instance::sorted(baselines, &delays, discount.clone())
            }
        }
    }

    pub fn arms(&self) -> usize {
        match self {
            InstanceSource::Fixed { instance } => instance.k(),
            InstanceSource::RandomDelays { baselines, .. } => baselines.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub instance: InstanceSource,
    pub algorithms: Vec<Algorithm>,
    pub horizon: u64,
    pub delta: f64,
    pub switch_cost: f64,
    pub seeds: Vec<u64>,
    pub out: Option<PathBuf>,
    /// Write every pull instead of at most [`DOWNSAMPLE_POINTS`] rows.
    pub full_resolution: bool,
}

/// Row budget of a downsampled curve.
pub const DOWNSAMPLE_POINTS: u64 = 2000;

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let k = self.instance.arms() as u64;
        if self.horizon < k {
            return Err(Error::InvalidParameter(format!("horizon {} below the arm count {k}", self.horizon)));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("at least one seed is required".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidParameter("at least one algorithm is required".into()));
        }
        if !(self.switch_cost >= 0.0 && self.switch_cost.is_finite()) {
            return Err(Error::InvalidParameter(format!("switch cost {} must be finite and >= 0", self.switch_cost)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta = {} outside (0, 1)", self.delta)));
        }
        let mut seen = self.seeds.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.seeds.len() {
            return Err(Error::InvalidParameter("seeds must be distinct".into()));
        }
        Ok(())
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_out(mut self, out: impl Into<PathBuf>) -> Self {
        self.out = Some(out.into());
        self
    }
}
