//! Learning the baseline order of the arms by action elimination.
//!
//! Each round samples every active arm once. An arm is removed when its
//! empirical mean is more than `2 eps_r` below every active arm that looks
//! at least as good and more than `2 eps_r` above every active arm that
//! looks at most as good. Removals build a binary tree whose in-order
//! traversal is the learned ranking.

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::model::bernoulli;
use crate::rng::StreamRng;

/// Default bound on the total pulls of one ranking run.
pub const DEFAULT_PULL_CAP: u64 = 10_000_000;

/// `eps_r = sqrt(ln(2 k r (r + 1) / delta) / (2 r))`.
pub fn epsilon_r(k: usize, r: u64, delta: f64) -> Result<f64> {
    if k < 2 || r == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon needs k >= 2, r >= 1, delta in (0, 1); got k = {k}, r = {r}, delta = {delta}"
        )));
    }
    let r = r as f64;
    Ok(((2.0 * k as f64 * r * (r + 1.0) / delta).ln() / (2.0 * r)).sqrt())
}

/// A source of one fresh sample per active arm per round.
pub trait RoundSampler {
    fn arms(&self) -> usize;

    /// One sample for each arm of `active`, in the same order. `removed`
    /// lists arms already eliminated.
    fn sample_round(&mut self, active: &[usize], removed: &[usize]) -> Result<Vec<f64>>;

    /// Pulls consumed so far, including any discarded ones.
    fn pulls(&self) -> u64;
}

/// Independent samples with fixed means.
#[derive(Debug, Clone)]
pub struct IidSampler {
    means: Vec<f64>,
    rng: StreamRng,
    noisy: bool,
    pulls: u64,
}

impl IidSampler {
    /// Bernoulli samples with success probabilities `means`.
    pub fn bernoulli(means: Vec<f64>, rng: StreamRng) -> Self {
        Self { means, rng, noisy: true, pulls: 0 }
    }

    /// Zero-variance samples: every draw equals the mean.
    pub fn exact(means: Vec<f64>, rng: StreamRng) -> Self {
        Self { means, rng, noisy: false, pulls: 0 }
    }
}

impl RoundSampler for IidSampler {
    fn arms(&self) -> usize {
        self.means.len()
    }

    fn sample_round(&mut self, active: &[usize], _: &[usize]) -> Result<Vec<f64>> {
        self.pulls += active.len() as u64;
        Ok(active
            .iter()
            .map(|&a| if self.noisy { bernoulli(self.means[a], &mut self.rng) } else { self.means[a] })
            .collect())
    }

    fn pulls(&self) -> u64 {
        self.pulls
    }
}

/// A kept sample of [`CalibratedSampler`]: the arm, the number of pulls since
/// its previous pull, and the delay-vector entry it was drawn at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetainedSample {
    pub arm: usize,
    pub gap: usize,
    pub tau: usize,
}

/// Samples arms of a delay-dependent environment at their baseline.
///
/// Active arms are split into groups of `d0`, each padded to `d0` pulls with
/// arms outside the group. The group's sequence is cycled twice and only the
/// second cycle's pulls of group arms are kept; each kept pull comes exactly
/// `d0 > d_i` steps after the previous pull of the same arm, so its
/// expectation is `mu_i`.
#[derive(Debug, Clone)]
pub struct CalibratedSampler {
    env: Environment,
    d0: usize,
    log: Vec<RetainedSample>,
    start_pulls: u64,
}

impl CalibratedSampler {
    pub fn new(env: Environment, d0: usize) -> Result<Self> {
        let max_delay = env.instance().max_delay();
        if d0 <= max_delay {
            return Err(Error::CalibrationBound { d0, max_delay });
        }
        if env.instance().k() < 2 {
            return Err(Error::InvalidParameter("calibrated sampling needs at least two arms".into()));
        }
        let start_pulls = env.pulls();
        Ok(Self { env, d0, log: Vec::new(), start_pulls })
    }

    pub fn d0(&self) -> usize {
        self.d0
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn into_env(self) -> Environment {
        self.env
    }

    /// Every sample returned so far.
    pub fn retained(&self) -> &[RetainedSample] {
        &self.log
    }

    fn groups(&self, active: &[usize]) -> Vec<Vec<usize>> {
        let k = self.env.instance().k();
        if active.len() == k && k < self.d0 {
            // No arm outside a single group could pad it.
            return vec![active[..k - 1].to_vec(), active[k - 1..].to_vec()];
        }
        active.chunks(self.d0).map(<[usize]>::to_vec).collect()
    }
}

impl RoundSampler for CalibratedSampler {
    fn arms(&self) -> usize {
        self.env.instance().k()
    }

    fn sample_round(&mut self, active: &[usize], removed: &[usize]) -> Result<Vec<f64>> {
        let mut out = vec![f64::NAN; active.len()];
        for group in self.groups(active) {
            let outside: Vec<usize> = removed.iter().chain(active).copied().filter(|a| !group.contains(a)).collect();
            let mut cycle = group.clone();
            let mut pads = outside.iter().cycle();
            while cycle.len() < self.d0 {
                cycle.push(
                    *pads.next().ok_or_else(|| {
                        Error::InvariantViolation("no arm available to pad a calibration group".into())
                    })?,
                );
            }
            for &arm in &cycle {
                self.env.try_pull(arm)?;
            }
            for &arm in &cycle {
                let sample = self.env.try_pull(arm)?;
                if let Some(slot) = group.contains(&arm).then(|| active.iter().position(|&a| a == arm)).flatten() {
                    if sample.tau != 0 {
                        return Err(Error::InvariantViolation(format!(
                            "calibrated sample of arm {arm} drawn at tau = {}",
                            sample.tau
                        )));
                    }
                    out[slot] = sample.realized;
                    self.log.push(RetainedSample { arm, gap: self.d0, tau: sample.tau });
                }
            }
        }
        Ok(out)
    }

    fn pulls(&self) -> u64 {
        self.env.pulls() - self.start_pulls
    }
}

/// Which side of a removed arm a subtree lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// Arms that looked better.
    Bigger,
    /// Arms that looked worse.
    Smaller,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
enum Slot {
    Root,
    Child(usize, Side),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub arm: usize,
    /// Round in which the arm was removed.
    pub round: u64,
    pub bigger: Option<usize>,
    pub smaller: Option<usize>,
}

/// Removal tree. Each node is a removed arm; its `bigger` subtree holds the
/// arms that looked better at removal time and shared its position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTree {
    nodes: Vec<TreeNode>,
    root: Option<usize>,
    slot_of: Vec<Slot>,
}

impl RankTree {
    pub fn new(k: usize) -> Self {
        Self { nodes: Vec::new(), root: None, slot_of: vec![Slot::Root; k] }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    /// Inserts `arm` at its current position; arms sharing that position
    /// move to its `Bigger` or `Smaller` side.
    fn remove(&mut self, arm: usize, round: u64, bigger: &[usize], smaller: &[usize]) {
        let id = self.nodes.len();
        self.nodes.push(TreeNode { arm, round, bigger: None, smaller: None });
        let slot = self.slot_of[arm];
        match slot {
            Slot::Root => self.root = Some(id),
            Slot::Child(p, Side::Bigger) => self.nodes[p].bigger = Some(id),
            Slot::Child(p, Side::Smaller) => self.nodes[p].smaller = Some(id),
        }
        for (arms, side) in [(bigger, Side::Bigger), (smaller, Side::Smaller)] {
            for &a in arms {
                if self.slot_of[a] == slot {
                    self.slot_of[a] = Slot::Child(id, side);
                }
            }
        }
    }

    /// In-order traversal; arms never removed are placed at their position,
    /// ordered by `tiebreak` (descending) among themselves.
    pub fn in_order(&self, unremoved: &[usize], tiebreak: &[f64]) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.slot_of.len());
        self.walk(Slot::Root, unremoved, tiebreak, &mut out);
        out
    }

    fn walk(&self, slot: Slot, unremoved: &[usize], tiebreak: &[f64], out: &mut Vec<usize>) {
        let node = match slot {
            Slot::Root => self.root,
            Slot::Child(p, Side::Bigger) => self.nodes[p].bigger,
            Slot::Child(p, Side::Smaller) => self.nodes[p].smaller,
        };
        match node {
            Some(id) => {
                self.walk(Slot::Child(id, Side::Bigger), unremoved, tiebreak, out);
                out.push(self.nodes[id].arm);
                self.walk(Slot::Child(id, Side::Smaller), unremoved, tiebreak, out);
            }
            None => {
                let mut leaf: Vec<usize> = unremoved.iter().copied().filter(|&a| self.slot_of[a] == slot).collect();
                leaf.sort_by(|&a, &b| tiebreak[b].total_cmp(&tiebreak[a]).then(a.cmp(&b)));
                out.extend(leaf);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingOutcome {
    /// Arms from best to worst (0-based).
    pub permutation: Vec<usize>,
    /// Round in which each arm was removed; `None` for the survivor.
    pub elimination_round: Vec<Option<u64>>,
    pub rounds: u64,
    /// Pulls consumed, including discarded calibration pulls.
    pub pulls: u64,
    /// Empirical means when the run ended.
    pub means: Vec<f64>,
    pub tree: RankTree,
    /// `false` when the pull cap stopped the run early.
    pub complete: bool,
}

/// Runs the elimination procedure until at most one arm is active or
/// `pull_cap` pulls have been spent.
pub fn rank_arms<S: RoundSampler + ?Sized>(sampler: &mut S, delta: f64, pull_cap: u64) -> Result<RankingOutcome> {
    let k = sampler.arms();
    epsilon_r(k, 1, delta)?;
    let mut active: Vec<usize> = (0..k).collect();
    let mut removed: Vec<usize> = Vec::new();
    let mut sums = vec![0.0; k];
    let mut means = vec![0.0; k];
    let mut elimination_round = vec![None; k];
    let mut tree = RankTree::new(k);
    let mut r = 0u64;
    let mut complete = true;

    while active.len() > 1 {
        if sampler.pulls() >= pull_cap {
            complete = false;
            break;
        }
        r += 1;
        let samples = sampler.sample_round(&active, &removed)?;
        for (&a, x) in active.iter().zip(samples) {
            sums[a] += x;
            means[a] = sums[a] / r as f64;
        }
        let eps = epsilon_r(k, r, delta)?;
        let mut order = active.clone();
        order.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(a.cmp(&b)));
        for i in order {
            if active.len() <= 1 {
                break;
            }
            let others = active.iter().copied().filter(|&j| j != i);
            let bigger: Vec<usize> = others.clone().filter(|&j| means[j] >= means[i]).collect();
            let smaller: Vec<usize> = others.filter(|&j| means[j] <= means[i]).collect();
            let min_bigger = bigger.iter().map(|&j| means[j]).fold(f64::INFINITY, f64::min);
            let max_smaller = smaller.iter().map(|&j| means[j]).fold(f64::NEG_INFINITY, f64::max);
            if means[i] + 2.0 * eps < min_bigger && means[i] - 2.0 * eps > max_smaller {
                tree.remove(i, r, &bigger, &smaller);
                elimination_round[i] = Some(r);
                active.retain(|&a| a != i);
                removed.push(i);
            }
        }
    }

    let permutation = tree.in_order(&active, &means);
    if permutation.len() != k {
        return Err(Error::InvariantViolation(format!("ranking has {} of {k} arms", permutation.len())));
    }
    Ok(RankingOutcome { permutation, elimination_round, rounds: r, pulls: sampler.pulls(), means, tree, complete })
}

/// Baseline gaps of a strictly decreasing mean vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    /// `pairwise[i][j] = mu_i - mu_j`.
    pub pairwise: Vec<Vec<f64>>,
    /// Gap of each arm to its nearest neighbour in the order.
    pub adjacent: Vec<f64>,
}

pub fn gap_profile(mu: &[f64]) -> Result<GapProfile> {
    if mu.len() < 2 {
        return Err(Error::InvalidParameter("gaps need at least two arms".into()));
    }
    if let Some(w) = mu.windows(2).find(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(format!(
            "means must be strictly decreasing, found {} then {}",
            w[0], w[1]
        )));
    }
    let pairwise: Vec<Vec<f64>> = mu.iter().map(|a| mu.iter().map(|b| a - b).collect()).collect();
    let k = mu.len();
    let adjacent = (0..k)
        .map(|i| {
            let above = (i > 0).then(|| mu[i - 1] - mu[i]);
            let below = (i + 1 < k).then(|| mu[i] - mu[i + 1]);
            match (above, below) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => unreachable!(),
            }
        })
        .collect();
    Ok(GapProfile { pairwise, adjacent })
}

/// `sum_{i < k} ln(1 / (delta Delta_i)) / Delta_i^2`, the order of magnitude
/// of the pulls needed to rank the arms.
pub fn predicted_pull_budget(profile: &GapProfile, delta: f64) -> f64 {
    let k = profile.adjacent.len();
    profile.adjacent[..k - 1].iter().map(|&g| (1.0 / (delta * g)).ln() / (g * g)).sum()
}
