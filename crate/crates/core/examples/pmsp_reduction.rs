//! Periodic maintenance scheduling as a bandit optimum.
//!
//! Machine `i` must be serviced exactly every `l_i` steps. Mapping it to an
//! arm with `d_i = l_i - 1` and full discount makes a perfect schedule the
//! only way to reach the threshold `sum 1/l_i`.

use b2dep::oracle::{optimal_average, pmsp_feasible, pmsp_threshold, pmsp_to_b2dep, PmspInstance, DEFAULT_PERIOD_CAP};

fn main() -> b2dep::Result<()> {
    for intervals in [vec![2, 4, 4], vec![2, 3, 6], vec![3, 3, 6, 6], vec![4, 6, 12]] {
        let p = PmspInstance::new(intervals.clone())?;
        let verdict = pmsp_feasible(&p, DEFAULT_PERIOD_CAP)?;
        let opt = optimal_average(&pmsp_to_b2dep(&p)?)?;
        let threshold = pmsp_threshold(&p);
        println!(
            "{intervals:?}: feasible {}, optimum {}, threshold {threshold}",
            verdict.feasible,
            opt.exact.map_or(format!("{:.6}", opt.mean), |r| r.to_string()),
        );
        if let Some(s) = verdict.schedule {
            let cells: Vec<String> = s.iter().map(|m| m.map_or("-".into(), |m| m.to_string())).collect();
            println!("  schedule {}", cells.join(" "));
        }
    }
    Ok(())
}
