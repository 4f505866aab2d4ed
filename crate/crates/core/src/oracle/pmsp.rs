//! Periodic maintenance scheduling: machine `i` must be serviced exactly
//! every `l_i` steps, at most one machine per step.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DiscountFunction, Instance};

/// Default bound on `lcm(l_1, ..., l_n)` for the exhaustive search.
pub const DEFAULT_PERIOD_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmspInstance {
    intervals: Vec<u64>,
}

impl PmspInstance {
    /// Requires at least one machine, positive intervals and
    /// `sum 1/l_i <= 1`.
    pub fn new(intervals: Vec<u64>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidPmsp("at least one machine is required".into()));
        }
        if intervals.contains(&0) {
            return Err(Error::InvalidPmsp("service intervals must be positive".into()));
        }
        let density = density(&intervals);
        if density > Ratio::from_integer(1) {
            return Err(Error::InvalidPmsp(format!("service density {density} exceeds 1")));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[u64] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// `lcm` of the intervals, saturating at `u128::MAX`.
    pub fn period(&self) -> u128 {
        self.intervals.iter().fold(1u128, |acc, &l| (acc / gcd(acc, l as u128)).saturating_mul(l as u128))
    }
}

fn density(intervals: &[u64]) -> Ratio<i128> {
    intervals.iter().map(|&l| Ratio::new(1, l as i128)).fold(Ratio::from_integer(0), |a, b| a + b)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Outcome of the exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmspVerdict {
    pub feasible: bool,
    /// `lcm` of the intervals.
    pub period: u64,
    /// Service offsets `o_i` (machine `i` is serviced at `t = o_i mod l_i`).
    pub offsets: Option<Vec<u64>>,
    /// One period of the witness: the machine serviced at each step, if any.
    pub schedule: Option<Vec<Option<usize>>>,
}

/// The B2DEP instance of the reduction: `mu_i = 1`, `d_i = l_i - 1` for each
/// machine, plus a zero-payoff filler arm with delay 1, all with `f = 1`.
pub fn pmsp_to_b2dep(pmsp: &PmspInstance) -> Result<Instance> {
    if let Some(&l) = pmsp.intervals.iter().find(|&&l| l < 2) {
        return Err(Error::InvalidPmsp(format!("interval {l} maps to a delay below 1")));
    }
    let mut mu = vec![1.0; pmsp.len()];
    let mut d: Vec<usize> = pmsp.intervals.iter().map(|&l| l as usize - 1).collect();
    mu.push(0.0);
    d.push(1);
    Instance::relaxed(&mu, &d, DiscountFunction::constant(1.0)?)
}

/// `sum mu_i / (d_i + 1)` over the machine arms of the reduced instance,
/// which is `sum 1/l_i`.
pub fn pmsp_threshold(pmsp: &PmspInstance) -> Ratio<i64> {
    let r = density(&pmsp.intervals);
    Ratio::new(*r.numer() as i64, *r.denom() as i64)
}

/// Searches all offset assignments `o_i in 0..l_i` (with `o_1 = 0`).
/// Machines `i` and `j` collide iff `o_i = o_j (mod gcd(l_i, l_j))`.
pub fn pmsp_feasible(pmsp: &PmspInstance, period_cap: u64) -> Result<PmspVerdict> {
    let period = pmsp.period();
    if period > period_cap as u128 {
        return Err(Error::PeriodTooLarge { period, cap: period_cap });
    }
    let period = period as u64;
    let l = &pmsp.intervals;
    let mut offsets = vec![0u64; l.len()];
    let found = place(l, &mut offsets, 1);
    if !found {
        return Ok(PmspVerdict { feasible: false, period, offsets: None, schedule: None });
    }
    let mut schedule = vec![None; period as usize];
    for (i, (&o, &li)) in offsets.iter().zip(l).enumerate() {
        for t in (o..period).step_by(li as usize) {
            if schedule[t as usize].is_some() {
                return Err(Error::InvariantViolation(format!("offsets {offsets:?} collide at step {t}")));
            }
            schedule[t as usize] = Some(i);
        }
    }
    Ok(PmspVerdict { feasible: true, period, offsets: Some(offsets), schedule: Some(schedule) })
}

fn place(l: &[u64], offsets: &mut [u64], i: usize) -> bool {
    if i == l.len() {
        return true;
    }
    for o in 0..l[i] {
        let clash = (0..i).any(|j| {
            let g = gcd(l[i] as u128, l[j] as u128) as u64;
            o % g == offsets[j] % g
        });
        if !clash {
            offsets[i] = o;
            if place(l, offsets, i + 1) {
                return true;
            }
        }
    }
    false
}
