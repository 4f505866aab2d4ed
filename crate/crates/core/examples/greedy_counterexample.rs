//! Greedy play can lose to a fixed ranking policy.
//!
//! Two arms with `mu = (1, 0.4)`, `d = (1, 1)` and a constant discount of
//! one half. Greedy keeps replaying the first arm at half value, while
//! alternating the two arms earns 0.7 per pull.

use b2dep::oracle::optimal_average;
use b2dep::policies::{greedy_long_run_average, rollout, GreedyPolicy, RankingPolicy};
use b2dep::{ghost_summary, DiscountFunction, Environment, Instance};

fn main() -> b2dep::Result<()> {
    let inst = Instance::new(&[1.0, 0.4], &[1, 1], DiscountFunction::constant(0.5)?)?;

    let greedy = greedy_long_run_average(&inst);
    let ghost = ghost_summary(&inst);
    let opt = optimal_average(&inst)?;
    println!("greedy long-run average   {greedy:.4}");
    println!("best ranking policy pi_{}  {:.4}", ghost.r_star, ghost.ghost_value());
    println!("optimal average           {:.4}", opt.mean);

    let horizon = 10_000;
    let mut env = Environment::noiseless(inst.clone());
    let g = rollout(&mut env, &mut GreedyPolicy, horizon);
    let mut env = Environment::noiseless(inst.clone());
    let r = rollout(&mut env, &mut RankingPolicy::new(ghost.r_star, &inst)?, horizon);
    println!("after {horizon} pulls: greedy {:.1}, pi_{} {:.1}", g.total_expected(), ghost.r_star, r.total_expected());
    Ok(())
}
