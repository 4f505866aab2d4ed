//! The delay-dependent payoff model.
//!
//! Every arm `i` has a baseline expectation `mu_i` and a delay parameter
//! `d_i >= 1`. Pulling arm `i` when `tau` rounds have passed since its last
//! pull has expected payoff
//!
//! ```text
//! mu_i(tau) = (1 - f(tau) * [0 < tau <= d_i]) * mu_i
//! ```
//!
//! where `f` is a nonincreasing discount with values in `[0, 1]`. The delay
//! vector is stored capped: an arm whose last pull is more than `d_i` rounds
//! old (or that was never pulled) carries `tau = 0`.
//!
//! Arms are indexed from zero. Ranking cutoffs (`m` in `pi_m`) count arms and
//! run from 1 to `k`.

use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The discount `f(tau)` applied to recently pulled arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DiscountFunction {
    /// `f(tau) = gamma^tau` with `gamma` in `(0, 1)`.
    Geometric { gamma: f64 },
    /// `f(tau) = c` for every `tau >= 1`.
    Constant { c: f64 },
    /// `f(1), ..., f(n)`, extended by `f(tau) = f(n)` for `tau > n`.
    Table { values: Vec<f64> },
}

impl DiscountFunction {
    pub fn geometric(gamma: f64) -> Result<Self> {
        let f = DiscountFunction::Geometric { gamma };
        f.validate()?;
        Ok(f)
    }

    pub fn constant(c: f64) -> Result<Self> {
        let f = DiscountFunction::Constant { c };
        f.validate()?;
        Ok(f)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        let f = DiscountFunction::Table { values };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DiscountFunction::Geometric { gamma } => {
                if !(*gamma > 0.0 && *gamma < 1.0) {
                    return Err(Error::InvalidDiscount(format!("geometric ratio must lie in (0, 1), got {gamma}")));
                }
            }
            DiscountFunction::Constant { c } => {
                if !(0.0..=1.0).contains(c) {
                    return Err(Error::InvalidDiscount(format!("constant discount must lie in [0, 1], got {c}")));
                }
            }
            DiscountFunction::Table { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidDiscount("empty discount table".into()));
                }
                if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(Error::InvalidDiscount(format!("table entry {v} outside [0, 1]")));
                }
                if let Some(w) = values.windows(2).find(|w| w[1] > w[0]) {
                    return Err(Error::InvalidDiscount(format!(
                        "table must be nonincreasing, found {} followed by {}",
                        w[0], w[1]
                    )));
                }
            }
        }
        Ok(())
    }

    /// `f(tau)`. The value at `tau = 0` is never used by the payoff law and is
    /// reported as `f(1)`.
    pub fn at(&self, tau: usize) -> f64 {
        let tau = tau.max(1);
        match self {
            DiscountFunction::Geometric { gamma } => gamma.powi(tau.min(i32::MAX as usize) as i32),
            DiscountFunction::Constant { c } => *c,
            DiscountFunction::Table { values } => values[(tau - 1).min(values.len() - 1)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmParams {
    /// Baseline expectation, in `[0, 1]`.
    pub mu: f64,
    /// Delay parameter, at least 1.
    pub d: usize,
}

/// A complete problem description: arms in baseline order plus the discount.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    arms: Vec<ArmParams>,
    discount: DiscountFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl Instance {
    /// Builds an instance whose baselines are strictly decreasing.
    pub fn new(mu: &[f64], delays: &[usize], discount: DiscountFunction) -> Result<Self> {
        let instance = Self::relaxed(mu, delays, discount)?;
        if let Some(w) = instance.arms.windows(2).find(|w| w[1].mu >= w[0].mu) {
            return Err(Error::InvalidInstance(format!(
                "baselines must be strictly decreasing, found {} then {}",
                w[0].mu, w[1].mu
            )));
        }
        Ok(instance)
    }

    /// Sorts the arms by decreasing baseline (carrying their delays along),
    /// then applies the strict checks of [`Instance::new`].
    pub fn sorted(mu: &[f64], delays: &[usize], discount: DiscountFunction) -> Result<Self> {
        if mu.len() != delays.len() {
            return Err(Error::InvalidInstance(format!("{} baselines but {} delays", mu.len(), delays.len())));
        }
        let mut pairs: Vec<(f64, usize)> = mu.iter().copied().zip(delays.iter().copied()).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (mu, delays): (Vec<f64>, Vec<usize>) = pairs.into_iter().unzip();
        Self::new(&mu, &delays, discount)
    }

    /// Builds an instance without the ordering requirement: ties and
    /// arbitrary order are accepted. Used by the scheduling reduction.
    pub fn relaxed(mu: &[f64], delays: &[usize], discount: DiscountFunction) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidInstance("at least one arm is required".into()));
        }
        if mu.len() != delays.len() {
            return Err(Error::InvalidInstance(format!("{} baselines but {} delays", mu.len(), delays.len())));
        }
        if let Some(m) = mu.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(Error::InvalidInstance(format!("baseline {m} outside [0, 1]")));
        }
        if delays.contains(&0) {
            return Err(Error::InvalidInstance("delays must be at least 1".into()));
        }
        discount.validate()?;
        Ok(Self { arms: mu.iter().zip(delays).map(|(&mu, &d)| ArmParams { mu, d }).collect(), discount, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn k(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[ArmParams] {
        &self.arms
    }

    pub fn mu(&self, arm: usize) -> f64 {
        self.arms[arm].mu
    }

    pub fn delay(&self, arm: usize) -> usize {
        self.arms[arm].d
    }

    pub fn baselines(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.mu).collect()
    }

    pub fn delays(&self) -> Vec<usize> {
        self.arms.iter().map(|a| a.d).collect()
    }

    pub fn discount(&self) -> &DiscountFunction {
        &self.discount
    }

    pub fn max_delay(&self) -> usize {
        self.arms.iter().map(|a| a.d).max().unwrap_or(0)
    }

    /// Whether baselines are strictly decreasing (always true unless built
    /// with [`Instance::relaxed`]).
    pub fn is_strictly_ordered(&self) -> bool {
        self.arms.windows(2).all(|w| w[1].mu < w[0].mu)
    }

    /// Number of distinct delay vectors, `prod (d_i + 1)`, saturating.
    pub fn state_space_size(&self) -> u128 {
        self.arms.iter().fold(1u128, |acc, a| acc.saturating_mul(a.d as u128 + 1))
    }

    fn check_arm(&self, arm: usize) -> Result<()> {
        if arm >= self.k() {
            return Err(Error::ArmOutOfRange { index: arm, arms: self.k() });
        }
        Ok(())
    }

    /// Expected payoff `mu_arm(tau)`.
    pub fn expected_payoff(&self, arm: usize, tau: usize) -> Result<f64> {
        self.check_arm(arm)?;
        Ok(self.mean(arm, tau))
    }

    /// Unchecked form of [`Instance::expected_payoff`].
    ///
    /// Panics if `arm` is out of range.
    #[inline]
    pub fn mean(&self, arm: usize, tau: usize) -> f64 {
        let ArmParams { mu, d } = self.arms[arm];
        if tau > 0 && tau <= d {
            (1.0 - self.discount.at(tau)) * mu
        } else {
            mu
        }
    }

    /// `sum_{j in arms} mu_j(tau)`, the block sum `mu_{m -> n}(tau)` written
    /// with a half-open range of zero-based arm indices.
    pub fn segment_sum(&self, arms: Range<usize>, tau: usize) -> Result<f64> {
        if arms.start >= arms.end || arms.end > self.k() {
            return Err(Error::ArmOutOfRange { index: arms.end.max(arms.start), arms: self.k() });
        }
        Ok(arms.map(|j| self.mean(j, tau)).sum())
    }

    /// Bernoulli draw with success probability `mu_arm(tau)`.
    pub fn sample_reward<R: Rng + ?Sized>(&self, arm: usize, tau: usize, rng: &mut R) -> Result<f64> {
        self.check_arm(arm)?;
        Ok(bernoulli(self.mean(arm, tau), rng))
    }
}

#[inline]
pub(crate) fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    if rng.gen_bool(p.clamp(0.0, 1.0)) {
        1.0
    } else {
        0.0
    }
}

/// The capped delay vector `tau(t)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DelayState(Vec<usize>);

impl DelayState {
    /// All arms unpulled.
    pub fn zero(k: usize) -> Self {
        DelayState(vec![0; k])
    }

    /// Wraps an explicit vector after checking `tau_i <= d_i`.
    pub fn from_taus(taus: Vec<usize>, instance: &Instance) -> Result<Self> {
        if taus.len() != instance.k() {
            return Err(Error::InvalidParameter(format!(
                "delay vector has {} entries for {} arms",
                taus.len(),
                instance.k()
            )));
        }
        if let Some((i, t)) = taus.iter().enumerate().find(|(i, t)| **t > instance.delay(*i)) {
            return Err(Error::InvalidParameter(format!("tau {t} of arm {i} exceeds its delay {}", instance.delay(i))));
        }
        Ok(DelayState(taus))
    }

    pub fn tau(&self, arm: usize) -> usize {
        self.0[arm]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&t| t == 0)
    }

    /// State after pulling `pulled`: the pulled arm goes to 1, arms with
    /// `1 <= tau < d` age by one, arms at `tau = d` wrap to 0 and unpulled
    /// arms stay at 0.
    pub fn advance(&self, pulled: usize, instance: &Instance) -> Result<DelayState> {
        instance.check_arm(pulled)?;
        let mut next = self.clone();
        next.step(pulled, instance);
        Ok(next)
    }

    /// In-place form of [`DelayState::advance`]; panics on a bad index.
    #[inline]
    pub fn step(&mut self, pulled: usize, instance: &Instance) {
        for (j, tau) in self.0.iter_mut().enumerate() {
            if j == pulled {
                *tau = 1;
            } else if *tau > 0 {
                *tau = if *tau < instance.arms[j].d { *tau + 1 } else { 0 };
            }
        }
    }

    /// Mixed-radix code of the state, in `0..prod (d_i + 1)`.
    pub fn encode(&self, instance: &Instance) -> usize {
        self.0.iter().zip(instance.arms()).rev().fold(0usize, |acc, (&tau, arm)| acc * (arm.d + 1) + tau)
    }

    /// Inverse of [`DelayState::encode`].
    pub fn decode(mut code: usize, instance: &Instance) -> Self {
        let mut taus = Vec::with_capacity(instance.k());
        for arm in instance.arms() {
            taus.push(code % (arm.d + 1));
            code /= arm.d + 1;
        }
        DelayState(taus)
    }
}

/// One pull: the arm, the delay it was pulled at, and both reward channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardSample {
    pub arm: usize,
    pub tau: usize,
    /// `mu_arm(tau)`.
    pub expected: f64,
    /// The observed reward.
    pub realized: f64,
}
