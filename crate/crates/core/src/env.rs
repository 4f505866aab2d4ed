use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{bernoulli, DelayState, Instance, RewardSample};
use crate::rng::{self, Purpose, StreamRng};

/// How realized rewards are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewardModel {
    /// Bernoulli draw with the expected payoff as success probability.
    #[default]
    Bernoulli,
    /// Noise-free: the realized reward equals the expectation.
    Expected,
}

/// A stateful simulator: an instance, its current delay vector and a reward
/// stream.
#[derive(Debug, Clone)]
pub struct Environment {
    instance: Instance,
    state: DelayState,
    rng: StreamRng,
    model: RewardModel,
    pulls: u64,
}

impl Environment {
    pub fn new(instance: Instance, model: RewardModel, rng: StreamRng) -> Self {
        let state = DelayState::zero(instance.k());
        Self { instance, state, rng, model, pulls: 0 }
    }

    /// Bernoulli environment on the reward stream of `(master, run)`.
    pub fn seeded(instance: Instance, master: u64, run: u64) -> Self {
        Self::new(instance, RewardModel::Bernoulli, rng::stream(master, run, Purpose::Rewards))
    }

    /// Noise-free environment; the stream is never consumed.
    pub fn noiseless(instance: Instance) -> Self {
        Self::new(instance, RewardModel::Expected, rng::stream(0, 0, Purpose::Rewards))
    }

    pub fn with_state(mut self, state: DelayState) -> Result<Self> {
        DelayState::from_taus(state.as_slice().to_vec(), &self.instance)?;
        self.state = state;
        Ok(self)
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn state(&self) -> &DelayState {
        &self.state
    }

    pub fn model(&self) -> RewardModel {
        self.model
    }

    /// Pulls made so far.
    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn rng_mut(&mut self) -> &mut impl Rng {
        &mut self.rng
    }

    /// Pulls `arm`, returns the sample and advances the delay vector.
    pub fn try_pull(&mut self, arm: usize) -> Result<RewardSample> {
        if arm >= self.instance.k() {
            return Err(Error::ArmOutOfRange { index: arm, arms: self.instance.k() });
        }
        Ok(self.pull(arm))
    }

    /// Panics if `arm` is out of range.
    pub fn pull(&mut self, arm: usize) -> RewardSample {
        let tau = self.state.tau(arm);
        let expected = self.instance.mean(arm, tau);
        let realized = match self.model {
            RewardModel::Bernoulli => bernoulli(expected, &mut self.rng),
            RewardModel::Expected => expected,
        };
        self.state.step(arm, &self.instance);
        self.pulls += 1;
        RewardSample { arm, tau, expected, realized }
    }
}
