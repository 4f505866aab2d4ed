//! Staged elimination over ranking policies with few switches.

use b2dep::low_switch::run_low_switch;
use b2dep::{ghost_summary, DiscountFunction, Environment, Instance};

fn main() -> b2dep::Result<()> {
    let inst = Instance::new(&[0.95, 0.8, 0.7, 0.4, 0.1], &[2, 3, 1, 2, 1], DiscountFunction::geometric(0.6)?)?;
    let horizon = 200_000;
    let mut env = Environment::seeded(inst.clone(), 11, 0);
    let run = run_low_switch(&mut env, horizon, 0.1)?;

    let g = ghost_summary(&inst).g_values;
    println!("true g: {:?}", g.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    for s in &run.stages {
        let est: Vec<String> = s.active.iter().zip(&s.estimates).map(|(m, e)| format!("{m}:{e:.3}")).collect();
        println!(
            "stage {} size {:>6} radius {:.3}  {}  dropped {:?}",
            s.stage,
            s.size,
            s.radius,
            est.join(" "),
            s.eliminated
        );
    }
    println!("survivors {:?}", run.survivors);
    println!("switches {} (bound {})", run.switches, run.schedule.switch_bound());
    println!("reward {:.1} over {horizon} pulls", run.trace.total_expected());
    Ok(())
}
