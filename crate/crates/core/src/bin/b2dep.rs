use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use b2dep::harness::{self, load_instance, Algorithm, ExperimentConfig, InstanceSource};
use b2dep::oracle::{self, PmspInstance};
use b2dep::policies::ghost_summary;
use b2dep::ranker::{rank_arms, CalibratedSampler, DEFAULT_PULL_CAP};
use b2dep::{Environment, Error, Result};

#[derive(Parser)]
#[command(name = "b2dep", version, about = "Delay-dependent bandits: oracles, learners and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal long-run average and an optimal cycle.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = oracle::DEFAULT_NODE_CAP)]
        node_cap: usize,
    },
    /// Values of the ranking policies and the best one.
    Ghost {
        #[arg(long)]
        instance: PathBuf,
        #[arg(short = 'T', long = "horizon")]
        horizon: Option<u64>,
    },
    /// Learn the arm order with calibrated sampling.
    Rank {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value = "0", value_parser = parse_seeds)]
        seeds: Seeds,
        /// Calibration gap; defaults to the largest delay plus one.
        #[arg(long)]
        d0: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_PULL_CAP)]
        pull_cap: u64,
    },
    /// Run one learner and report its regret.
    Learn {
        #[arg(long)]
        instance: PathBuf,
        #[arg(short = 'T', long = "horizon", default_value_t = 100_000)]
        horizon: u64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value = "0", value_parser = parse_seeds)]
        seeds: Seeds,
        #[arg(long, default_value_t = 1.0)]
        switch_cost: f64,
        #[arg(long, default_value = "low")]
        algo: Algorithm,
    },
    /// Maintenance-scheduling feasibility and the reduced bandit optimum.
    Pmsp {
        /// Service intervals, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        intervals: Vec<u64>,
        #[arg(long, default_value_t = oracle::DEFAULT_PERIOD_CAP)]
        period_cap: u64,
    },
    /// Run a preset or a custom experiment and write CSV files.
    Experiment {
        #[arg(long, conflicts_with = "instance", required_unless_present = "instance")]
        preset: Option<String>,
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(short = 'T', long = "horizon")]
        horizon: Option<u64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        switch_cost: Option<f64>,
        #[arg(long, value_parser = parse_seeds)]
        seeds: Option<Seeds>,
        #[arg(long, value_delimiter = ',')]
        algos: Option<Vec<Algorithm>>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Write every pull instead of a downsampled curve.
        #[arg(long)]
        full_resolution: bool,
    },
}

#[derive(Debug, Clone)]
struct Seeds(Vec<u64>);

/// `a..b` (half-open) or a comma-separated list.
fn parse_seeds(s: &str) -> std::result::Result<Seeds, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("{e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("{e}"))?;
        if a >= b {
            return Err(format!("empty seed range {s}"));
        }
        return Ok(Seeds((a..b).collect()));
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(Seeds)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::InvariantViolation(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Oracle { instance, node_cap } => {
            let inst = load_instance(&instance)?;
            let opt = oracle::optimal_average_capped(&inst, node_cap)?;
            let ghost = ghost_summary(&inst);
            if opt.mean < ghost.ghost_value() - 1e-12 {
                return Err(Error::InvariantViolation(format!(
                    "optimum {} below the best ranking policy {}",
                    opt.mean,
                    ghost.ghost_value()
                )));
            }
            print!("{opt}");
            println!("best ranking policy: pi_{} with {:.12}", ghost.r_star, ghost.ghost_value());
        }
        Command::Ghost { instance, horizon } => {
            let inst = load_instance(&instance)?;
            let g = ghost_summary(&inst);
            for (m, v) in g.g_values.iter().enumerate() {
                println!("g({}) = {v:.12}", m + 1);
            }
            println!("r_star = {}", g.r_star);
            println!("r_zero = {}", g.r_zero);
            if let Some(t) = horizon {
                let series = harness::ghost_reference(&inst, t as usize);
                println!("ghost reward after {t} pulls = {:.6}", series.last().copied().unwrap_or(0.0));
            }
        }
        Command::Rank { instance, delta, seeds, d0, pull_cap } => {
            let inst = load_instance(&instance)?;
            let d0 = d0.unwrap_or(inst.max_delay() + 1);
            for seed in seeds.0 {
                let env = Environment::seeded(inst.clone(), seed, 0);
                let mut sampler = CalibratedSampler::new(env, d0)?;
                let out = rank_arms(&mut sampler, delta, pull_cap)?;
                let order: Vec<String> = out.permutation.iter().map(|a| (a + 1).to_string()).collect();
                let correct = out.permutation.iter().enumerate().all(|(i, &a)| i == a);
                println!(
                    "seed {seed}: order {} ({}), {} rounds, {} pulls{}",
                    order.join(","),
                    if correct { "correct" } else { "wrong" },
                    out.rounds,
                    out.pulls,
                    if out.complete { "" } else { ", pull cap reached" }
                );
            }
        }
        Command::Learn { instance, horizon, delta, seeds, switch_cost, algo } => {
            let inst = load_instance(&instance)?;
            let config = ExperimentConfig {
                name: "learn".into(),
                instance: InstanceSource::Fixed { instance: inst },
                algorithms: vec![algo],
                horizon,
                delta,
                switch_cost,
                seeds: seeds.0,
                out: None,
                full_resolution: false,
            };
            let results = harness::simulate(&config)?;
            for cell in &results.cells {
                println!(
                    "{} seed {}: reward {:.3}, switches {}, regret {:.3}",
                    cell.algorithm, cell.seed, cell.last.cum_expected, cell.switches, cell.last.regret
                );
            }
        }
        Command::Pmsp { intervals, period_cap } => {
            let p = PmspInstance::new(intervals)?;
            let verdict = oracle::pmsp_feasible(&p, period_cap)?;
            let reduced = oracle::pmsp_to_b2dep(&p)?;
            let opt = oracle::optimal_average(&reduced)?;
            let threshold = oracle::pmsp_threshold(&p);
            let threshold_f = *threshold.numer() as f64 / *threshold.denom() as f64;
            println!("feasible: {}", verdict.feasible);
            if let Some(s) = &verdict.schedule {
                let cells: Vec<String> = s.iter().map(|m| m.map_or("-".into(), |m| (m + 1).to_string())).collect();
                println!("schedule (period {}): {}", verdict.period, cells.join(","));
            }
            println!("threshold: {threshold}");
            print!("reduced optimum: {opt}");
            let reaches = match opt.exact {
                Some(r) => r >= threshold,
                None => opt.mean >= threshold_f - 1e-12,
            };
            if reaches != verdict.feasible {
                return Err(Error::InvariantViolation(format!(
                    "feasible = {} but optimum {} vs threshold {threshold}",
                    verdict.feasible, opt.mean
                )));
            }
        }
        Command::Experiment { preset, instance, horizon, delta, switch_cost, seeds, algos, out, full_resolution } => {
            let mut config = match (preset, instance) {
                (Some(name), _) => {
                    harness::preset(&name).ok_or_else(|| Error::InvalidParameter(format!("unknown preset {name:?}")))?
                }
                (None, Some(path)) => ExperimentConfig {
                    name: "custom".into(),
                    instance: InstanceSource::Fixed { instance: load_instance(&path)? },
                    algorithms: vec![Algorithm::Low, Algorithm::Ucb],
                    horizon: 100_000,
                    delta: harness::DEFAULT_DELTA,
                    switch_cost: 1.0,
                    seeds: (0..5).collect(),
                    out: None,
                    full_resolution: false,
                },
                (None, None) => unreachable!("clap requires one of --preset and --instance"),
            };
            if let Some(t) = horizon {
                config.horizon = t;
            }
            if let Some(d) = delta {
                config.delta = d;
            }
            if let Some(c) = switch_cost {
                config.switch_cost = c;
            }
            if let Some(s) = seeds {
                config.seeds = s.0;
            }
            if let Some(a) = algos {
                config.algorithms = a;
            }
            config.full_resolution = full_resolution;
            config.out = Some(out);
            let (results, files) = harness::run_experiment(&config)?;
            for &a in &config.algorithms {
                let switches: Vec<u64> = results.cells_of(a).map(|c| c.switches).collect();
                println!("{a}: mean final regret {:.3}, switches {:?}", results.mean_final_regret(a), switches);
            }
            if let Some(f) = files {
                println!(
                    "wrote {} run files, {} aggregates and {}",
                    f.runs.len(),
                    f.aggregates.len(),
                    f.metadata.display()
                );
            }
        }
    }
    Ok(())
}
