//! Exact optima: the best periodic schedule as a maximum mean cycle of the
//! delay-state graph, the value of alternating two ranking policies, and the
//! maintenance-scheduling reduction.

pub mod cycle;
mod graph;
pub mod pmsp;

use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{DelayState, Instance};
use crate::policies::steady_average;

pub use cycle::{howard, karp, CycleWeight, MeanCycle, WeightedDigraph, KARP_NODE_LIMIT};
pub use graph::{build_state_graph, StateGraph, DEFAULT_NODE_CAP};
pub use pmsp::{pmsp_feasible, pmsp_threshold, pmsp_to_b2dep, PmspInstance, PmspVerdict, DEFAULT_PERIOD_CAP};

/// Largest common denominator for which edge weights are scaled to integers.
const MAX_EXACT_DENOMINATOR: i64 = 1 << 20;

/// Optimal long-run average and a cycle attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalCycle {
    /// `rho*`.
    pub mean: f64,
    /// `rho*` as a fraction, when the weights admitted exact arithmetic.
    #[serde(serialize_with = "ser_ratio")]
    pub exact: Option<Ratio<i64>>,
    /// Delay vectors along the cycle; `arms[i]` is pulled in `states[i]`.
    pub states: Vec<DelayState>,
    /// Arms pulled along the cycle (0-based).
    pub arms: Vec<usize>,
    /// Expected payoff of each pull on the cycle.
    pub weights: Vec<f64>,
}

fn ser_ratio<S: Serializer>(r: &Option<Ratio<i64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl OptimalCycle {
    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }
}

impl fmt::Display for OptimalCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) => writeln!(f, "mean {:.12} ({r})", self.mean)?,
            None => writeln!(f, "mean {:.12}", self.mean)?,
        }
        let arms: Vec<String> = self.arms.iter().map(|a| (a + 1).to_string()).collect();
        writeln!(f, "arms {}", arms.join(","))?;
        for (state, (&arm, &w)) in self.states.iter().zip(self.arms.iter().zip(&self.weights)) {
            writeln!(f, "  tau {:?} pull {} -> {w:.6}", state.as_slice(), arm + 1)?;
        }
        Ok(())
    }
}

/// Maximum mean cycle reachable from the start node of `graph`.
///
/// Uses Karp's recurrence up to [`KARP_NODE_LIMIT`] reachable nodes and
/// policy iteration above it. Weights that are all multiples of some
/// `1/L` (`L <= 2^20`) are scaled to integers first, making the result exact.
pub fn max_mean_cycle(graph: &StateGraph) -> Result<OptimalCycle> {
    let g = graph.graph();
    let reachable = g.reachable_from(graph.start()).len();
    let scale = common_denominator(g);
    let (cycle, exact) = match scale {
        Some(l) if reachable <= KARP_NODE_LIMIT => {
            let ints = g.map_weights(|w| (w * l as f64).round() as i64);
            let c = karp(&ints, graph.start()).ok_or_else(no_cycle)?;
            let exact = c.mean / l;
            let mean = *exact.numer() as f64 / *exact.denom() as f64;
            (MeanCycle { mean, nodes: c.nodes, edges: c.edges }, Some(exact))
        }
        _ if reachable <= KARP_NODE_LIMIT => (karp(g, graph.start()).ok_or_else(no_cycle)?, None),
        _ => (howard(g, graph.start()).ok_or_else(no_cycle)?, None),
    };
    let weights: Vec<f64> = cycle.nodes.iter().zip(&cycle.edges).map(|(&u, &e)| g.successors(u)[e].1).collect();
    let mean = match exact {
        Some(_) => cycle.mean,
        None => weights.iter().sum::<f64>() / weights.len() as f64,
    };
    Ok(OptimalCycle {
        mean,
        exact,
        states: cycle.nodes.iter().map(|&u| graph.state(u)).collect(),
        arms: cycle.edges,
        weights,
    })
}

fn no_cycle() -> Error {
    Error::InvariantViolation("delay-state graph has no reachable cycle".into())
}

/// Smallest `L` with every weight within `1e-9 / L` of a multiple of `1/L`.
fn common_denominator(g: &WeightedDigraph<f64>) -> Option<i64> {
    let mut weights: Vec<f64> = (0..g.node_count()).flat_map(|u| g.successors(u).iter().map(|e| e.1)).collect();
    weights.sort_by(f64::total_cmp);
    weights.dedup();
    let mut l: i64 = 1;
    for w in weights {
        let q = small_denominator(w)?;
        l = num_integer_lcm(l, q);
        if l > MAX_EXACT_DENOMINATOR {
            return None;
        }
    }
    // Sums of n_nodes weights scaled by l must fit in i64 comfortably.
    ((g.node_count() as i128 + 1) * l as i128 <= (i64::MAX / 4) as i128).then_some(l)
}

fn small_denominator(w: f64) -> Option<i64> {
    (1..=4096i64).find(|&q| {
        let x = w * q as f64;
        (x - x.round()).abs() <= 1e-9
    })
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// `rho*` of `instance` with the default node cap.
pub fn optimal_average(instance: &Instance) -> Result<OptimalCycle> {
    optimal_average_capped(instance, DEFAULT_NODE_CAP)
}

pub fn optimal_average_capped(instance: &Instance, node_cap: usize) -> Result<OptimalCycle> {
    max_mean_cycle(&build_state_graph(instance, node_cap)?)
}

/// Long-run per-pull value of repeating one play of `pi_m` followed by one
/// play of `pi_n` (cutoffs are 1-based).
pub fn alternation_value(instance: &Instance, m: usize, n: usize) -> Result<f64> {
    for r in [m, n] {
        if r == 0 || r > instance.k() {
            return Err(Error::RankOutOfRange { rank: r, arms: instance.k() });
        }
    }
    let sequence: Vec<usize> = (0..m).chain(0..n).collect();
    steady_average(instance, &sequence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiscountFunction;
    use crate::policies::g_value;

    fn fig3() -> Instance {
        Instance::new(&[1.0, 13.0 / 15.0], &[2, 2], DiscountFunction::table(vec![0.3, 0.25]).unwrap()).unwrap()
    }

    #[test]
    fn greedy_example_alternates() {
        let i = Instance::new(&[1.0, 0.4], &[1, 1], DiscountFunction::constant(0.5).unwrap()).unwrap();
        let opt = optimal_average(&i).unwrap();
        assert!((opt.mean - 0.7).abs() < 1e-12);
        assert_eq!(opt.exact, Some(Ratio::new(7, 10)));
        let mut arms = opt.arms.clone();
        arms.sort();
        assert_eq!(arms, vec![0, 1]);
    }

    #[test]
    fn single_arm_full_discount() {
        let i = Instance::new(&[0.8], &[1], DiscountFunction::constant(1.0).unwrap()).unwrap();
        let opt = optimal_average(&i).unwrap();
        assert_eq!(opt.mean, 0.0);
        assert_eq!(opt.arms, vec![0]);
    }

    #[test]
    fn fig3_optimum_beats_alternation() {
        let i = fig3();
        let alt = alternation_value(&i, 1, 2).unwrap();
        assert!((alt - (0.75 + 0.7 + 13.0 / 15.0) / 3.0).abs() < 1e-12);
        let opt = optimal_average(&i).unwrap();
        assert!(opt.mean >= alt - 1e-12);
        let mean: f64 = opt.weights.iter().sum::<f64>() / opt.len() as f64;
        assert!((mean - opt.mean).abs() < 1e-12);
    }

    #[test]
    fn alternation_degenerates_to_g() {
        let i = fig3();
        for m in 1..=2 {
            assert!((alternation_value(&i, m, m).unwrap() - g_value(&i, m).unwrap()).abs() < 1e-12);
        }
        assert!(matches!(alternation_value(&i, 0, 2), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(alternation_value(&i, 1, 3), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn irrational_weights_use_floats() {
        let i = Instance::new(&[0.9, 0.5], &[2, 1], DiscountFunction::geometric(0.5f64.sqrt()).unwrap()).unwrap();
        let opt = optimal_average(&i).unwrap();
        assert!(opt.exact.is_none());
        assert!(opt.mean >= g_value(&i, 1).unwrap() - 1e-12);
    }

    #[test]
    fn witness_cycle_is_consistent() {
        let i = fig3();
        let opt = optimal_average(&i).unwrap();
        for (idx, state) in opt.states.iter().enumerate() {
            let next = state.advance(opt.arms[idx], &i).unwrap();
            assert_eq!(next, opt.states[(idx + 1) % opt.len()]);
            assert_eq!(opt.weights[idx], i.mean(opt.arms[idx], state.tau(opt.arms[idx])));
        }
    }

    #[test]
    fn best_ranking_policy_can_trail_the_optimum_by_more_than_f_r0() {
        // Arm 2 can be replayed every other step at full value, which no
        // ranking policy exploits.
        let i =
            Instance::new(&[1.0, 0.9, 0.2], &[2, 1, 1], DiscountFunction::table(vec![0.9, 0.9, 0.0]).unwrap()).unwrap();
        let s = crate::policies::ghost_summary(&i);
        assert_eq!((s.r_star, s.r_zero), (3, 3));
        assert_eq!(i.discount().at(s.r_zero), 0.0);
        assert!((s.ghost_value() - 0.7).abs() < 1e-12);
        let pattern = steady_average(&i, &[0, 1, 2, 1]).unwrap();
        assert!((pattern - 0.75).abs() < 1e-12);
        assert!(optimal_average(&i).unwrap().mean >= pattern - 1e-12);
    }
}
