//! UCB1 over ranking policies with double roll-outs.
//!
//! Each selection plays the chosen `pi_m` twice in a row. The first roll-out
//! realigns the delay vector; only the per-pull mean of the second one
//! updates the estimate of `g(m)`.

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::error::Result;
use crate::policies::RankingPolicy;
use crate::trace::PolicyTrace;

/// `mean + sqrt(2 ln n / n_m)`, infinite for an unplayed policy.
pub fn ucb_index(mean: f64, n_m: u64, n: u64) -> f64 {
    if n_m == 0 {
        return f64::INFINITY;
    }
    mean + (2.0 * (n.max(1) as f64).ln() / n_m as f64).sqrt()
}

/// Per-policy statistics, indexed by cutoff `m - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcbState {
    pub counts: Vec<u64>,
    pub means: Vec<f64>,
    /// Completed estimation updates.
    pub n: u64,
}

impl UcbState {
    pub fn new(k: usize) -> Self {
        Self { counts: vec![0; k], means: vec![0.0; k], n: 0 }
    }

    /// Cutoff with the largest index, lowest on ties.
    pub fn select(&self) -> usize {
        let mut best = 0;
        let mut best_index = f64::NEG_INFINITY;
        for m in 0..self.counts.len() {
            let idx = ucb_index(self.means[m], self.counts[m], self.n);
            if idx > best_index {
                best = m;
                best_index = idx;
            }
        }
        best + 1
    }

    pub fn update(&mut self, m: usize, reward: f64) {
        let c = &mut self.counts[m - 1];
        *c += 1;
        self.means[m - 1] += (reward - self.means[m - 1]) / *c as f64;
        self.n += 1;
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UcbRun {
    pub trace: PolicyTrace,
    pub state: UcbState,
    pub switches: u64,
    /// Selected cutoff at each selection, in order.
    pub selections: Vec<usize>,
}

impl UcbRun {
    /// Number of times cutoff `m` was selected.
    pub fn selections_of(&self, m: usize) -> usize {
        self.selections.iter().filter(|&&s| s == m).count()
    }
}

/// Runs UCB1 over `pi_1, ..., pi_k` for `horizon` pulls.
pub fn run_ucb_rankings(env: &mut Environment, horizon: u64) -> Result<UcbRun> {
    let k = env.instance().k();
    let mut state = UcbState::new(k);
    let mut trace = PolicyTrace::with_capacity(horizon as usize);
    let mut selections = Vec::new();
    let mut switches = 0;
    let mut current: Option<usize> = None;
    while (trace.len() as u64) < horizon {
        let m = RankingPolicy::new(state.select(), env.instance())?.m();
        let mut switched = current.is_some_and(|c| c != m);
        switches += switched as u64;
        current = Some(m);
        selections.push(m);
        let mut second = 0.0;
        let mut finished = true;
        'pair: for rollout in 0..2 {
            for arm in 0..m {
                if trace.len() as u64 >= horizon {
                    finished = false;
                    break 'pair;
                }
                let sample = env.pull(arm);
                if rollout == 1 {
                    second += sample.realized;
                }
                trace.push(sample, Some(m), rollout == 1, switched);
                switched = false;
            }
        }
        if finished {
            state.update(m, second / m as f64);
        }
    }
    Ok(UcbRun { trace, state, switches, selections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiscountFunction, Instance};

    #[test]
    fn index_values() {
        let e2 = std::f64::consts::E.powi(2);
        assert!((ucb_index(0.5, 1, e2.round() as u64) - (0.5 + (2.0 * (e2.round()).ln()).sqrt())).abs() < 1e-12);
        assert_eq!(ucb_index(0.3, 0, 10), f64::INFINITY);
        assert!(ucb_index(0.0, 1_000_000, 1_000_000) < 0.01);
    }

    #[test]
    fn unplayed_policies_come_first() {
        let mut s = UcbState::new(3);
        assert_eq!(s.select(), 1);
        s.update(1, 1.0);
        assert_eq!(s.select(), 2);
        s.update(2, 0.0);
        assert_eq!(s.select(), 3);
    }

    #[test]
    fn single_arm() {
        let inst = Instance::new(&[0.5], &[1], DiscountFunction::constant(0.5).unwrap()).unwrap();
        let mut env = Environment::seeded(inst, 2, 0);
        let run = run_ucb_rankings(&mut env, 101).unwrap();
        assert_eq!(run.switches, 0);
        assert_eq!(run.trace.len(), 101);
        assert_eq!(run.state.n, 50);
    }

    #[test]
    fn pairs_use_two_m_pulls() {
        let inst = Instance::new(&[0.9, 0.5, 0.2], &[1, 2, 1], DiscountFunction::geometric(0.5).unwrap()).unwrap();
        let mut env = Environment::noiseless(inst);
        let run = run_ucb_rankings(&mut env, 1000).unwrap();
        let full: usize = run.selections.iter().map(|&m| 2 * m).sum();
        assert!(full >= 1000 && full - 1000 < 2 * 3);
        assert_eq!(run.state.counts.iter().sum::<u64>(), run.state.n);
    }
}
