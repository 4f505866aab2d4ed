use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::harness::config::{Algorithm, ExperimentConfig, DOWNSAMPLE_POINTS};
use crate::harness::io::instance_hash;
use crate::harness::regret::{
    aggregate, downsample_grid, ghost_reference, regret_vs_ghost, AggregateRow, RegretCurve, RegretRow,
};
use crate::low_switch::{run_low_switch, stage_schedule, StageRecord, StageSchedule};
use crate::model::Instance;
use crate::policies::{ghost_summary, rollout, GhostSummary, GreedyPolicy, RankingPolicy};
use crate::trace::PolicyTrace;
use crate::ucb::run_ucb_rankings;

/// Outcome of one `(algorithm, seed)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Regret rows on the output grid.
    pub curve: RegretCurve,
    /// Row after the last pull.
    pub last: RegretRow,
    pub switches: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<Vec<StageRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub survivors: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploitation_tail: Option<u64>,
}

impl CellResult {
    pub fn final_regret(&self) -> f64 {
        self.last.regret
    }

    /// Regret at pull `t`, if `t` is on the output grid.
    pub fn regret_at(&self, t: u64) -> Option<f64> {
        self.curve.at(t).map(|r| r.regret)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedInstance {
    pub seed: u64,
    pub instance: Instance,
    pub hash: String,
    pub ghost: GhostSummary,
}

/// Everything an experiment produced, before it is written out.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    pub instances: Vec<SeedInstance>,
    pub schedule: StageSchedule,
    pub cells: Vec<CellResult>,
}

impl ExperimentResults {
    pub fn cells_of(&self, algorithm: Algorithm) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(move |c| c.algorithm == algorithm)
    }

    pub fn mean_final_regret(&self, algorithm: Algorithm) -> f64 {
        let v: Vec<f64> = self.cells_of(algorithm).map(CellResult::final_regret).collect();
        v.iter().sum::<f64>() / v.len() as f64
    }

    pub fn aggregate(&self, algorithm: Algorithm) -> Result<Vec<AggregateRow>> {
        let curves: Vec<&RegretCurve> = self.cells_of(algorithm).map(|c| &c.curve).collect();
        aggregate(&curves)
    }
}

/// Runs one algorithm for `horizon` pulls on the reward stream of `seed`.
pub fn run_trace(
    instance: &Instance,
    algorithm: Algorithm,
    horizon: u64,
    delta: f64,
    seed: u64,
) -> Result<(PolicyTrace, Option<crate::low_switch::LowSwitchRun>)> {
    let mut env = Environment::seeded(instance.clone(), seed, 0);
    Ok(match algorithm {
        Algorithm::Low => {
            let mut run = run_low_switch(&mut env, horizon, delta)?;
            let trace = std::mem::take(&mut run.trace);
            (trace, Some(run))
        }
        Algorithm::Ucb => (run_ucb_rankings(&mut env, horizon)?.trace, None),
        Algorithm::Greedy => (rollout(&mut env, &mut GreedyPolicy, horizon as usize), None),
        Algorithm::Ghost => {
            let mut p = RankingPolicy::new(ghost_summary(instance).r_star, instance)?;
            (rollout(&mut env, &mut p, horizon as usize), None)
        }
    })
}

fn run_cell(config: &ExperimentConfig, instance: &Instance, algorithm: Algorithm, seed: u64) -> Result<CellResult> {
    let (trace, low) = run_trace(instance, algorithm, config.horizon, config.delta, seed)?;
    let ceiling = config.horizon as f64 * instance.mu(0);
    if trace.total_expected() > ceiling + 1e-9 * ceiling.max(1.0) {
        return Err(Error::InvariantViolation(format!(
            "{algorithm} seed {seed}: expected reward {} exceeds T mu_1 = {ceiling}",
            trace.total_expected()
        )));
    }
    let ghost = ghost_reference(instance, config.horizon as usize);
    let full = regret_vs_ghost(&trace, &ghost, config.switch_cost)?;
    drop(trace);
    let last = *full.rows.last().ok_or_else(|| Error::InvalidParameter("empty horizon".into()))?;
    let curve =
        if config.full_resolution { full } else { full.restrict(&downsample_grid(config.horizon, DOWNSAMPLE_POINTS)) };
    Ok(CellResult {
        algorithm,
        seed,
        curve,
        last,
        switches: last.switches,
        stages: low.as_ref().map(|r| r.stages.clone()),
        survivors: low.as_ref().map(|r| r.survivors.clone()),
        exploitation_tail: low.as_ref().map(|r| r.exploitation_tail),
    })
}

/// Runs every `(algorithm, seed)` cell in parallel. Results are ordered by
/// algorithm (as listed) then seed, independent of scheduling.
pub fn simulate(config: &ExperimentConfig) -> Result<ExperimentResults> {
    config.validate()?;
    let instances = config
        .seeds
        .iter()
        .map(|&seed| {
            let instance = config.instance.resolve(seed)?;
            Ok(SeedInstance { seed, hash: instance_hash(&instance), ghost: ghost_summary(&instance), instance })
        })
        .collect::<Result<Vec<_>>>()?;
    let schedule = stage_schedule(config.instance.arms(), config.horizon, config.delta)?;
    let jobs: Vec<(Algorithm, &SeedInstance)> =
        config.algorithms.iter().flat_map(|&a| instances.iter().map(move |s| (a, s))).collect();
    let cells =
        jobs.into_par_iter().map(|(a, s)| run_cell(config, &s.instance, a, s.seed)).collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResults { config: config.clone(), instances, schedule, cells })
}

/// Files written by [`write_results`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentFiles {
    pub runs: Vec<PathBuf>,
    pub aggregates: Vec<PathBuf>,
    pub metadata: PathBuf,
}

pub const RUN_HEADER: &str = "t,algo,seed,cum_expected,cum_realized,switches,regret";
pub const AGGREGATE_HEADER: &str = "t,algo,mean_regret,std_regret,n_runs";

pub fn run_csv(cell: &CellResult) -> String {
    let mut s = String::with_capacity(64 * (cell.curve.len() + 1));
    s.push_str(RUN_HEADER);
    s.push('\n');
    for r in &cell.curve.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.t, cell.algorithm, cell.seed, r.cum_expected, r.cum_realized, r.switches, r.regret
        );
    }
    s
}

pub fn aggregate_csv(algorithm: Algorithm, rows: &[AggregateRow]) -> String {
    let mut s = String::with_capacity(48 * (rows.len() + 1));
    s.push_str(AGGREGATE_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.t, algorithm, r.mean_regret, r.std_regret, r.n_runs);
    }
    s
}

#[derive(Serialize)]
struct Metadata<'a> {
    name: &'a str,
    version: &'a str,
    horizon: u64,
    delta: f64,
    switch_cost: f64,
    seeds: &'a [u64],
    algorithms: &'a [Algorithm],
    full_resolution: bool,
    instances: &'a [SeedInstance],
    schedule: &'a StageSchedule,
    cells: Vec<CellSummary<'a>>,
}

#[derive(Serialize)]
struct CellSummary<'a> {
    algorithm: Algorithm,
    seed: u64,
    final_regret: f64,
    cum_expected: f64,
    cum_realized: f64,
    switches: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    survivors: Option<&'a [usize]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exploitation_tail: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stages: Option<&'a [StageRecord]>,
}

/// Writes one CSV per cell, one aggregate CSV per algorithm and
/// `metadata.json` into `dir`.
pub fn write_results(results: &ExperimentResults, dir: &Path) -> Result<ExperimentFiles> {
    fs::create_dir_all(dir)?;
    let mut runs = Vec::new();
    for cell in &results.cells {
        let p = dir.join(format!("{}_seed{}.csv", cell.algorithm, cell.seed));
        fs::write(&p, run_csv(cell))?;
        runs.push(p);
    }
    let mut aggregates = Vec::new();
    for &a in &results.config.algorithms {
        let p = dir.join(format!("{a}_aggregate.csv"));
        fs::write(&p, aggregate_csv(a, &results.aggregate(a)?))?;
        aggregates.push(p);
    }
    let c = &results.config;
    let meta = Metadata {
        name: &c.name,
        version: env!("CARGO_PKG_VERSION"),
        horizon: c.horizon,
        delta: c.delta,
        switch_cost: c.switch_cost,
        seeds: &c.seeds,
        algorithms: &c.algorithms,
        full_resolution: c.full_resolution,
        instances: &results.instances,
        schedule: &results.schedule,
        cells: results
            .cells
            .iter()
            .map(|cell| CellSummary {
                algorithm: cell.algorithm,
                seed: cell.seed,
                final_regret: cell.last.regret,
                cum_expected: cell.last.cum_expected,
                cum_realized: cell.last.cum_realized,
                switches: cell.switches,
                survivors: cell.survivors.as_deref(),
                exploitation_tail: cell.exploitation_tail,
                stages: cell.stages.as_deref(),
            })
            .collect(),
    };
    let metadata = dir.join("metadata.json");
    let json = serde_json::to_string_pretty(&meta)
        .map_err(|e| Error::Format { path: metadata.display().to_string(), message: e.to_string() })?;
    fs::write(&metadata, json + "\n")?;
    Ok(ExperimentFiles { runs, aggregates, metadata })
}

/// [`simulate`] then [`write_results`] into the configured output directory
/// (if any).
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentResults, Option<ExperimentFiles>)> {
    let results = simulate(config)?;
    let files = match &config.out {
        Some(dir) => Some(write_results(&results, dir)?),
        None => None,
    };
    Ok((results, files))
}
