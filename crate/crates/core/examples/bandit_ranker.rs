//! Learning the order of the arms with calibrated samples.
//!
//! Each kept sample of an arm is drawn long enough after its previous pull
//! that the delay has expired, so it estimates the baseline directly.

use b2dep::ranker::{gap_profile, predicted_pull_budget, rank_arms, CalibratedSampler, DEFAULT_PULL_CAP};
use b2dep::{DiscountFunction, Environment, Instance};

fn main() -> b2dep::Result<()> {
    let inst = Instance::new(&[0.9, 0.7, 0.5, 0.3], &[2, 1, 3, 2], DiscountFunction::constant(0.6)?)?;
    let delta = 0.1;
    let profile = gap_profile(&inst.baselines())?;
    // Order of magnitude only; constants and calibration overhead are not included.
    println!("pull budget scale {:.0}", predicted_pull_budget(&profile, delta));

    for seed in 0..5 {
        let env = Environment::seeded(inst.clone(), seed, 0);
        let mut sampler = CalibratedSampler::new(env, inst.max_delay() + 1)?;
        let out = rank_arms(&mut sampler, delta, DEFAULT_PULL_CAP)?;
        println!("seed {seed}: order {:?} after {} rounds, {} pulls", out.permutation, out.rounds, out.pulls);
    }
    Ok(())
}
