//! Staged elimination over ranking policies with few switches.
//!
//! Stage `s` has size `T_s = ceil(T^(1 - 2^-s))`. Every active policy `pi_m`
//! is played `ceil(T_s / (m |A_s|)) + 1` times in a row, ascending in `m`;
//! the first play of each visit only realigns the delay vector and is not
//! used for estimation. After the stage, policies whose estimate falls more
//! than `2 C_s` below the empirical best are dropped.

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::trace::PolicyTrace;

/// Precomputed stage sizes and confidence radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSchedule {
    pub k: usize,
    pub horizon: u64,
    pub delta: f64,
    /// `T_1, ..., T_S`.
    pub sizes: Vec<u64>,
    /// `C_1, ..., C_S`.
    pub radii: Vec<f64>,
}

impl StageSchedule {
    /// Number of stages `S`.
    pub fn stages(&self) -> usize {
        self.sizes.len()
    }

    /// Deterministic bound `k S` on policy switches.
    pub fn switch_bound(&self) -> u64 {
        (self.k * self.stages()) as u64
    }
}

/// `ceil(T^(1 - 2^-s))`, snapping values within `1e-9` of an integer so that
/// rounding error in `powf` cannot push an exact power up by one.
fn stage_size(horizon: u64, s: usize) -> u64 {
    let x = (horizon as f64).powf(1.0 - 0.5f64.powi(s as i32));
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Stage sizes, `S = min { j : sum_{s <= j} (k + T_s) >= T }`, and
/// `C_s = sqrt(k / (2 T_s) ln(2 k S / delta))`.
pub fn stage_schedule(k: usize, horizon: u64, delta: f64) -> Result<StageSchedule> {
    if k == 0 || horizon < k as u64 {
        return Err(Error::InvalidParameter(format!("need T >= k >= 1, got k = {k}, T = {horizon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} outside (0, 1)")));
    }
    let mut sizes = Vec::new();
    let mut total = 0u64;
    while total < horizon {
        let t = stage_size(horizon, sizes.len() + 1);
        total += k as u64 + t;
        sizes.push(t);
    }
    let s = sizes.len() as f64;
    let log = (2.0 * k as f64 * s / delta).ln();
    let radii = sizes.iter().map(|&t| (k as f64 / (2.0 * t as f64) * log).sqrt()).collect();
    Ok(StageSchedule { k, horizon, delta, sizes, radii })
}

/// Plays of `pi_m` in a stage of size `stage_size` with `active` policies,
/// counting the calibration play.
pub fn plays_per_policy(stage_size: u64, m: usize, active: usize) -> u64 {
    let per = (m * active) as u64;
    stage_size.div_ceil(per) + 1
}

/// What happened in one stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    /// 1-based stage index.
    pub stage: usize,
    pub size: u64,
    pub radius: f64,
    /// Active cutoffs at the start of the stage, ascending.
    pub active: Vec<usize>,
    /// Plays made of each active policy (including the calibration play).
    pub plays: Vec<u64>,
    /// Per-pull mean over retained plays; `NaN` when nothing was retained.
    pub estimates: Vec<f64>,
    /// Empirical best; `None` if the stage was cut short by the budget.
    pub best: Option<usize>,
    pub eliminated: Vec<usize>,
    /// Whether the stage ran to completion.
    pub complete: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowSwitchRun {
    pub trace: PolicyTrace,
    pub schedule: StageSchedule,
    pub stages: Vec<StageRecord>,
    pub switches: u64,
    /// Active cutoffs when the budget ran out.
    pub survivors: Vec<usize>,
    /// Pulls spent replaying the last empirical best after stage `S`.
    pub exploitation_tail: u64,
}

struct Runner<'a> {
    env: &'a mut Environment,
    horizon: u64,
    trace: PolicyTrace,
    current: Option<usize>,
    switches: u64,
}

impl Runner<'_> {
    fn exhausted(&self) -> bool {
        self.trace.len() as u64 >= self.horizon
    }

    /// One play of `pi_m`; returns the realized total, or `None` if the
    /// budget ran out mid-play.
    fn play(&mut self, m: usize, retained: bool) -> Option<f64> {
        let mut total = 0.0;
        for arm in 0..m {
            if self.exhausted() {
                return None;
            }
            let switched = self.current.is_some_and(|c| c != m);
            self.current = Some(m);
            self.switches += switched as u64;
            let sample = self.env.pull(arm);
            total += sample.realized;
            self.trace.push(sample, Some(m), retained, switched);
        }
        Some(total)
    }
}

/// Runs the staged learner for `horizon` pulls on `env`, over the ranking
/// policies of the environment's arm order.
pub fn run_low_switch(env: &mut Environment, horizon: u64, delta: f64) -> Result<LowSwitchRun> {
    let k = env.instance().k();
    let schedule = stage_schedule(k, horizon, delta)?;
    let mut runner =
        Runner { env, horizon, trace: PolicyTrace::with_capacity(horizon as usize), current: None, switches: 0 };
    let mut active: Vec<usize> = (1..=k).collect();
    let mut stages = Vec::with_capacity(schedule.stages());
    let mut best = None;

    for (idx, (&size, &radius)) in schedule.sizes.iter().zip(&schedule.radii).enumerate() {
        let mut plays = vec![0u64; active.len()];
        let mut sums = vec![0.0; active.len()];
        let mut counts = vec![0u64; active.len()];
        let mut complete = true;
        'stage: for (slot, &m) in active.iter().enumerate() {
            for play in 0..plays_per_policy(size, m, active.len()) {
                match runner.play(m, play > 0) {
                    Some(total) => {
                        plays[slot] += 1;
                        if play > 0 {
                            sums[slot] += total;
                            counts[slot] += m as u64;
                        }
                    }
                    None => {
                        complete = false;
                        break 'stage;
                    }
                }
            }
        }
        let estimates: Vec<f64> =
            sums.iter().zip(&counts).map(|(&s, &c)| if c > 0 { s / c as f64 } else { f64::NAN }).collect();
        let mut record = StageRecord {
            stage: idx + 1,
            size,
            radius,
            active: active.clone(),
            plays,
            estimates,
            best: None,
            eliminated: Vec::new(),
            complete,
        };
        if !complete {
            stages.push(record);
            break;
        }
        let top = (0..active.len()).fold(0, |b, i| if record.estimates[i] > record.estimates[b] { i } else { b });
        let threshold = record.estimates[top] - 2.0 * radius;
        let (keep, drop): (Vec<usize>, Vec<usize>) = (0..active.len()).partition(|&i| record.estimates[i] >= threshold);
        record.best = Some(active[top]);
        record.eliminated = drop.iter().map(|&i| active[i]).collect();
        best = record.best;
        active = keep.iter().map(|&i| active[i]).collect();
        stages.push(record);
        if runner.exhausted() {
            break;
        }
    }

    let mut tail = 0;
    if let Some(m) = best {
        while !runner.exhausted() {
            let before = runner.trace.len();
            runner.play(m, false);
            tail += (runner.trace.len() - before) as u64;
        }
    }

    let switches = runner.switches;
    if switches > schedule.switch_bound() {
        return Err(Error::InvariantViolation(format!(
            "{switches} switches exceed the bound k S = {}",
            schedule.switch_bound()
        )));
    }
    Ok(LowSwitchRun { trace: runner.trace, schedule, stages, switches, survivors: active, exploitation_tail: tail })
}
