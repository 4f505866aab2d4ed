use serde::{Deserialize, Serialize};

use crate::model::RewardSample;

/// One pull inside a trace, with the running totals after it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub sample: RewardSample,
    /// Cutoff `m` of the ranking policy being executed, when a learner
    /// drives the pulls.
    pub policy: Option<usize>,
    /// Whether the learner used this reward in an estimate.
    pub retained: bool,
    /// Policy switches so far, including one made at this step.
    pub switches: u64,
    pub cum_expected: f64,
    pub cum_realized: f64,
}

/// Time-indexed record of a run. Cumulative fields are prefix sums of the
/// samples.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicyTrace {
    steps: Vec<TraceStep>,
}

impl PolicyTrace {
    pub fn with_capacity(n: usize) -> Self {
        Self { steps: Vec::with_capacity(n) }
    }

    pub fn push(&mut self, sample: RewardSample, policy: Option<usize>, retained: bool, switched: bool) {
        let (switches, cum_expected, cum_realized) = match self.steps.last() {
            Some(s) => (s.switches, s.cum_expected, s.cum_realized),
            None => (0, 0.0, 0.0),
        };
        self.steps.push(TraceStep {
            sample,
            policy,
            retained,
            switches: switches + switched as u64,
            cum_expected: cum_expected + sample.expected,
            cum_realized: cum_realized + sample.realized,
        });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn samples(&self) -> impl Iterator<Item = &RewardSample> {
        self.steps.iter().map(|s| &s.sample)
    }

    pub fn total_expected(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cum_expected)
    }

    pub fn total_realized(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cum_realized)
    }

    pub fn switches(&self) -> u64 {
        self.steps.last().map_or(0, |s| s.switches)
    }

    pub fn cum_expected(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.cum_expected).collect()
    }
}
