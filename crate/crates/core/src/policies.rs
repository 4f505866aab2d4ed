//! Ranking policies, the greedy policy and exact per-pull values.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::model::{DelayState, Instance};
use crate::trace::PolicyTrace;

/// Two values closer than this are treated as tied when picking a maximizer.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Arm pulled by `pi_m` at the 1-based step `t` of its cycle.
pub fn ranking_arm(m: usize, t: usize) -> usize {
    debug_assert!(m >= 1 && t >= 1);
    (t - 1) % m
}

/// Anything that picks the next arm from the step index and the current
/// delay vector.
pub trait ArmPolicy {
    /// `t` is the 1-based step of the rollout.
    fn select(&mut self, t: usize, state: &DelayState, instance: &Instance) -> usize;

    /// Ranking cutoff being executed, if the policy is a ranking policy.
    fn cutoff(&self) -> Option<usize> {
        None
    }
}

/// `pi_m`: cycles over the top `m` arms in baseline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingPolicy {
    m: usize,
}

impl RankingPolicy {
    pub fn new(m: usize, instance: &Instance) -> Result<Self> {
        if m == 0 || m > instance.k() {
            return Err(Error::RankOutOfRange { rank: m, arms: instance.k() });
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

impl ArmPolicy for RankingPolicy {
    fn select(&mut self, t: usize, _: &DelayState, _: &Instance) -> usize {
        ranking_arm(self.m, t)
    }

    fn cutoff(&self) -> Option<usize> {
        Some(self.m)
    }
}

/// Pulls the arm with the highest current expectation.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyPolicy;

impl ArmPolicy for GreedyPolicy {
    fn select(&mut self, _: usize, state: &DelayState, instance: &Instance) -> usize {
        greedy_arm(instance, state)
    }
}

/// Repeats a fixed arm sequence.
#[derive(Debug, Clone)]
pub struct CyclicSequence {
    arms: Vec<usize>,
}

impl CyclicSequence {
    pub fn new(arms: Vec<usize>, instance: &Instance) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::InvalidParameter("empty arm sequence".into()));
        }
        if let Some(&a) = arms.iter().find(|&&a| a >= instance.k()) {
            return Err(Error::ArmOutOfRange { index: a, arms: instance.k() });
        }
        Ok(Self { arms })
    }
}

impl ArmPolicy for CyclicSequence {
    fn select(&mut self, t: usize, _: &DelayState, _: &Instance) -> usize {
        self.arms[(t - 1) % self.arms.len()]
    }
}

/// `argmax_i mu_i(tau_i)`, lowest index on exact ties.
pub fn greedy_arm(instance: &Instance, state: &DelayState) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for arm in 0..instance.k() {
        let v = instance.mean(arm, state.tau(arm));
        if v > best_value {
            best = arm;
            best_value = v;
        }
    }
    best
}

/// Steady per-pull value of `pi_m`: `(mu_1(m) + ... + mu_m(m)) / m`.
pub fn g_value(instance: &Instance, m: usize) -> Result<f64> {
    if m == 0 || m > instance.k() {
        return Err(Error::RankOutOfRange { rank: m, arms: instance.k() });
    }
    Ok(instance.segment_sum(0..m, m)? / m as f64)
}

/// `g(1), ..., g(k)`.
pub fn g_values(instance: &Instance) -> Vec<f64> {
    (1..=instance.k()).map(|m| instance.segment_sum(0..m, m).expect("cutoff in range") / m as f64).collect()
}

/// Lowest 1-based index whose value is within [`TIE_TOLERANCE`] of the max.
pub(crate) fn lowest_argmax(values: &[f64]) -> usize {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().position(|&v| v >= max - TIE_TOLERANCE).map_or(1, |i| i + 1)
}

/// The best ranking policy and the approximation index `r0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhostSummary {
    /// `g(1), ..., g(k)`.
    pub g_values: Vec<f64>,
    /// Lowest maximizer of `g` (1-based cutoff).
    pub r_star: usize,
    /// Largest `r` such that `mu_i > max_{j<i} mu_j(i - j)` for `i = 2..=r`.
    pub r_zero: usize,
}

impl GhostSummary {
    pub fn ghost_value(&self) -> f64 {
        self.g_values[self.r_star - 1]
    }
}

pub fn ghost_summary(instance: &Instance) -> GhostSummary {
    let g_values = g_values(instance);
    let r_star = lowest_argmax(&g_values);
    GhostSummary { g_values, r_star, r_zero: r_zero(instance) }
}

fn r_zero(instance: &Instance) -> usize {
    let mut r = 1;
    for i in 1..instance.k() {
        let beaten = (0..i).all(|j| instance.mu(i) > instance.mean(j, i - j));
        if !beaten {
            break;
        }
        r = i + 1;
    }
    r
}

/// Runs `policy` for `horizon` pulls against `env`.
pub fn rollout<P: ArmPolicy + ?Sized>(env: &mut Environment, policy: &mut P, horizon: usize) -> PolicyTrace {
    let mut trace = PolicyTrace::with_capacity(horizon);
    for t in 1..=horizon {
        let arm = policy.select(t, env.state(), env.instance());
        let sample = env.pull(arm);
        trace.push(sample, policy.cutoff(), false, false);
    }
    trace
}

/// Long-run per-pull expectation of a periodic arm sequence started from the
/// all-zero delay vector.
///
/// Simulates whole periods until the delay vector at a period boundary
/// repeats, then averages over the recurrent block of periods. Exact for any
/// sequence (no assumption on the delays).
pub fn steady_average(instance: &Instance, sequence: &[usize]) -> Result<f64> {
    if sequence.is_empty() {
        return Err(Error::InvalidParameter("empty arm sequence".into()));
    }
    if let Some(&a) = sequence.iter().find(|&&a| a >= instance.k()) {
        return Err(Error::ArmOutOfRange { index: a, arms: instance.k() });
    }
    let mut state = DelayState::zero(instance.k());
    let mut seen: HashMap<DelayState, usize> = HashMap::new();
    let mut period_rewards: Vec<f64> = Vec::new();
    loop {
        if let Some(&first) = seen.get(&state) {
            let block = &period_rewards[first..];
            let total: f64 = block.iter().sum();
            return Ok(total / (block.len() * sequence.len()) as f64);
        }
        seen.insert(state.clone(), period_rewards.len());
        let mut reward = 0.0;
        for &arm in sequence {
            reward += instance.mean(arm, state.tau(arm));
            state.step(arm, instance);
        }
        period_rewards.push(reward);
    }
}

/// Long-run per-pull expectation of the greedy policy from the zero state.
pub fn greedy_long_run_average(instance: &Instance) -> f64 {
    let mut state = DelayState::zero(instance.k());
    let mut seen: HashMap<DelayState, usize> = HashMap::new();
    let mut rewards: Vec<f64> = Vec::new();
    loop {
        if let Some(&first) = seen.get(&state) {
            let cycle = &rewards[first..];
            return cycle.iter().sum::<f64>() / cycle.len() as f64;
        }
        seen.insert(state.clone(), rewards.len());
        let arm = greedy_arm(instance, &state);
        rewards.push(instance.mean(arm, state.tau(arm)));
        state.step(arm, instance);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiscountFunction;
    use approx::assert_relative_eq;

    fn fig3() -> Instance {
        Instance::new(&[1.0, 13.0 / 15.0], &[2, 2], DiscountFunction::table(vec![0.3, 0.25]).unwrap()).unwrap()
    }

    fn greedy_example(eps: f64) -> Instance {
        Instance::new(&[1.0, 0.5 - eps], &[1, 1], DiscountFunction::constant(0.5).unwrap()).unwrap()
    }

    #[test]
    fn ranking_arm_cycles() {
        assert_eq!(ranking_arm(3, 1), 0);
        assert_eq!(ranking_arm(3, 4), 0);
        assert_eq!(ranking_arm(3, 3), 2);
        assert!((1..50).all(|t| ranking_arm(1, t) == 0));
    }

    #[test]
    fn greedy_examples() {
        let inst = greedy_example(0.1);
        assert_eq!(greedy_arm(&inst, &DelayState::zero(2)), 0);
        let s = DelayState::from_taus(vec![1, 0], &inst).unwrap();
        assert_eq!(greedy_arm(&inst, &s), 0);

        // mu_1(1) = 0.5 ties with the fresh second arm.
        let tie = Instance::new(&[1.0, 0.5], &[1, 1], DiscountFunction::constant(0.5).unwrap()).unwrap();
        assert_eq!(greedy_arm(&tie, &s), 0);
        let s2 = DelayState::from_taus(vec![1, 1], &tie).unwrap();
        assert_eq!(greedy_arm(&tie, &s2), 0);
    }

    #[test]
    fn g_values_of_the_equal_optima_instance() {
        let inst = fig3();
        assert_relative_eq!(g_value(&inst, 1).unwrap(), 0.7, epsilon = 1e-15);
        assert_relative_eq!(g_value(&inst, 2).unwrap(), 0.7, epsilon = 1e-15);
        assert!(g_value(&inst, 0).is_err());
        assert!(g_value(&inst, 3).is_err());
        let ghost = ghost_summary(&inst);
        assert_eq!(ghost.r_star, 1);
    }

    #[test]
    fn g_without_discount_at_full_cycle() {
        let inst = Instance::new(&[0.9, 0.6, 0.3], &[1, 2, 2], DiscountFunction::constant(0.8).unwrap()).unwrap();
        assert_relative_eq!(g_value(&inst, 3).unwrap(), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn claimed_nonmonotone_example_is_monotone() {
        let inst =
            Instance::new(&[1.0, 2.0 / 3.0, 0.5], &[2, 2, 2], DiscountFunction::geometric(0.5).unwrap()).unwrap();
        let g = g_values(&inst);
        assert_relative_eq!(g[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(g[1], 0.625, epsilon = 1e-15);
        assert_relative_eq!(g[2], 13.0 / 18.0, epsilon = 1e-15);
    }

    #[test]
    fn ghost_summary_examples() {
        let single = Instance::new(&[0.4], &[3], DiscountFunction::constant(0.5).unwrap()).unwrap();
        let s = ghost_summary(&single);
        assert_eq!((s.r_star, s.r_zero), (1, 1));

        let s = ghost_summary(&greedy_example(0.1));
        assert_eq!(s.r_zero, 1);

        let flat = Instance::new(&[0.9, 0.8, 0.1], &[2, 2, 2], DiscountFunction::constant(0.0).unwrap()).unwrap();
        let s = ghost_summary(&flat);
        assert_eq!((s.r_star, s.r_zero), (1, 1));

        // r0 = 3: every next arm beats the discounted replays before it.
        let deep =
            Instance::new(&[1.0, 0.9, 0.2], &[2, 1, 1], DiscountFunction::table(vec![0.9, 0.9, 0.0]).unwrap()).unwrap();
        assert_eq!(ghost_summary(&deep).r_zero, 3);
    }

    #[test]
    fn rollout_totals() {
        let inst = fig3();
        let mut env = Environment::noiseless(inst.clone());
        assert!(rollout(&mut env, &mut GreedyPolicy, 0).is_empty());

        let ghost = ghost_summary(&inst);
        let r = ghost.r_star;
        let cycles = 7;
        let mut env = Environment::noiseless(inst.clone());
        let mut pi = RankingPolicy::new(r, &inst).unwrap();
        let trace = rollout(&mut env, &mut pi, cycles * r);
        let expected = inst.segment_sum(0..r, 0).unwrap() + (cycles - 1) as f64 * r as f64 * ghost.ghost_value();
        assert_relative_eq!(trace.total_expected(), expected, epsilon = 1e-12);

        let inst = greedy_example(0.1);
        let horizon = 101;
        let mut env = Environment::noiseless(inst);
        let trace = rollout(&mut env, &mut GreedyPolicy, horizon);
        assert_relative_eq!(trace.total_expected(), 1.0 + (horizon - 1) as f64 / 2.0, epsilon = 1e-12);
        assert!(trace.samples().all(|s| s.arm == 0));
    }

    #[test]
    fn steady_averages() {
        let inst = fig3();
        assert_relative_eq!(steady_average(&inst, &[0]).unwrap(), 0.7, epsilon = 1e-15);
        assert_relative_eq!(steady_average(&inst, &[0, 1]).unwrap(), 0.7, epsilon = 1e-15);
        assert_relative_eq!(
            steady_average(&inst, &[0, 0, 1]).unwrap(),
            (0.75 + 0.7 + 13.0 / 15.0) / 3.0,
            epsilon = 1e-15
        );
        assert!(steady_average(&inst, &[]).is_err());
        assert!(steady_average(&inst, &[2]).is_err());

        assert_relative_eq!(greedy_long_run_average(&greedy_example(0.01)), 0.5, epsilon = 1e-15);
    }
}
