//! Regret curves on seven arms with random delays, written as CSV.
//!
//! `cargo run --release --example fig2_regret [horizon] [out_dir]`

use b2dep::harness::{preset_fig2, run_experiment, Algorithm};

fn main() -> b2dep::Result<()> {
    let mut args = std::env::args().skip(1);
    let horizon: u64 = args.next().map_or(20_000, |s| s.parse().expect("horizon must be an integer"));
    let out = args.next().unwrap_or_else(|| "out/fig2".into());
    let config = preset_fig2().with_horizon(horizon).with_out(&out);
    let (results, _) = run_experiment(&config)?;

    let grid: Vec<u64> = (1..=5).map(|j| horizon * j / 5).collect();
    println!("{:>8} {:>10} {:>10}", "t", "low", "ucb");
    let low = results.aggregate(Algorithm::Low)?;
    let ucb = results.aggregate(Algorithm::Ucb)?;
    for t in grid {
        let at =
            |rows: &[b2dep::harness::AggregateRow]| rows.iter().find(|r| r.t == t).map_or(f64::NAN, |r| r.mean_regret);
        println!("{t:>8} {:>10.1} {:>10.1}", at(&low), at(&ucb));
    }
    println!("files in {out}");
    Ok(())
}
