//! Two equally good ranking policies, with and without a switching cost.
//!
//! UCB keeps alternating between them, which pays when switching is free
//! (the alternation beats both) and costs a lot when each switch is charged.
//!
//! `cargo run --release --example fig3_switching [horizon]`

use b2dep::harness::{preset_fig3, simulate, Algorithm};

fn main() -> b2dep::Result<()> {
    let horizon = std::env::args().nth(1).map_or(Ok(50_000), |s| s.parse()).expect("horizon must be an integer");
    for cost in [true, false] {
        let config = preset_fig3(cost).with_horizon(horizon);
        let results = simulate(&config)?;
        println!("{}:", config.name);
        for a in [Algorithm::Low, Algorithm::Ucb] {
            let switches: u64 = results.cells_of(a).map(|c| c.switches).sum();
            println!(
                "  {a}: mean final regret {:>9.2}, mean switches {:>8.1}",
                results.mean_final_regret(a),
                switches as f64 / config.seeds.len() as f64
            );
        }
    }
    Ok(())
}
