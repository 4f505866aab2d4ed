//! The values `g(m)` of the ranking policies need not be unimodal, so the
//! best cutoff has to be found by scanning all of them.

use b2dep::oracle::alternation_value;
use b2dep::{ghost_summary, DiscountFunction, Instance};

fn main() -> b2dep::Result<()> {
    let inst = Instance::new(&[1.0, 0.95, 0.3, 0.25, 0.2], &[4, 1, 1, 1, 1], DiscountFunction::geometric(0.9)?)?;
    let s = ghost_summary(&inst);
    for (m, g) in s.g_values.iter().enumerate() {
        let mark = if m + 1 == s.r_star { "  <- best" } else { "" };
        println!("g({}) = {g:.4}{mark}", m + 1);
    }
    let local = s.g_values.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count();
    println!("interior local minima: {local}");

    println!("\nalternating two policies, one play each:");
    for m in 1..=inst.k() {
        let row: Vec<String> =
            (1..=inst.k()).map(|n| format!("{:.3}", alternation_value(&inst, m, n).unwrap())).collect();
        println!("  pi_{m} + pi_n: {}", row.join("  "));
    }
    Ok(())
}
