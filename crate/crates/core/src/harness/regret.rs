//! Regret against the best ranking policy, on the expectation channel.

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::policies::{ghost_summary, rollout, RankingPolicy};
use crate::trace::PolicyTrace;

/// Cumulative expected reward of `pi_{r*}` after each of the first `horizon`
/// pulls, starting from the all-zero delay vector.
pub fn ghost_reference(instance: &Instance, horizon: usize) -> Vec<f64> {
    let r_star = ghost_summary(instance).r_star;
    let mut policy = RankingPolicy::new(r_star, instance).expect("r* is a valid cutoff");
    let mut env = Environment::noiseless(instance.clone());
    rollout(&mut env, &mut policy, horizon).cum_expected()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretRow {
    /// Pulls made so far (1-based).
    pub t: u64,
    pub cum_expected: f64,
    pub cum_realized: f64,
    pub switches: u64,
    pub regret: f64,
}

/// Per-pull regret rows of one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    pub rows: Vec<RegretRow>,
}

impl RegretCurve {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn final_regret(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.regret)
    }

    /// Row at pull `t`, if present.
    pub fn at(&self, t: u64) -> Option<&RegretRow> {
        self.rows.binary_search_by_key(&t, |r| r.t).ok().map(|i| &self.rows[i])
    }

    /// Keeps only the rows whose `t` is in the ascending list `grid`.
    pub fn restrict(&self, grid: &[u64]) -> RegretCurve {
        RegretCurve { rows: grid.iter().filter_map(|&t| self.at(t).copied()).collect() }
    }
}

/// `regret(t) = ghost(t) - (G_t - cost * switches(t))`.
pub fn regret_vs_ghost(trace: &PolicyTrace, ghost: &[f64], switch_cost: f64) -> Result<RegretCurve> {
    if trace.len() != ghost.len() {
        return Err(Error::LengthMismatch { left: trace.len(), right: ghost.len() });
    }
    let rows = trace
        .steps()
        .iter()
        .zip(ghost)
        .enumerate()
        .map(|(i, (s, &g))| RegretRow {
            t: i as u64 + 1,
            cum_expected: s.cum_expected,
            cum_realized: s.cum_realized,
            switches: s.switches,
            regret: g - (s.cum_expected - switch_cost * s.switches as f64),
        })
        .collect();
    Ok(RegretCurve { rows })
}

/// At most `points` evenly spaced pull counts `j T / points`, ending at `T`.
pub fn downsample_grid(horizon: u64, points: u64) -> Vec<u64> {
    let n = points.min(horizon);
    let mut grid: Vec<u64> = (1..=n).map(|j| j * horizon / n).collect();
    grid.dedup();
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub t: u64,
    pub mean_regret: f64,
    /// Population standard deviation across runs.
    pub std_regret: f64,
    pub n_runs: usize,
}

/// Pointwise mean and standard deviation of regret over runs sharing a grid.
pub fn aggregate(curves: &[&RegretCurve]) -> Result<Vec<AggregateRow>> {
    let Some(first) = curves.first() else {
        return Ok(Vec::new());
    };
    for c in curves {
        if c.len() != first.len() {
            return Err(Error::LengthMismatch { left: first.len(), right: c.len() });
        }
    }
    let n = curves.len() as f64;
    Ok((0..first.len())
        .map(|i| {
            let t = first.rows[i].t;
            let values: Vec<f64> = curves.iter().map(|c| c.rows[i].regret).collect();
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            AggregateRow { t, mean_regret: mean, std_regret: var.sqrt(), n_runs: curves.len() }
        })
        .collect())
}
