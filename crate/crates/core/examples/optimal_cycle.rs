//! Exact optimum of a small instance via the maximum mean cycle of its
//! delay-state graph.

use b2dep::oracle::{build_state_graph, max_mean_cycle, DEFAULT_NODE_CAP};
use b2dep::{ghost_summary, DiscountFunction, Instance};

fn main() -> b2dep::Result<()> {
    let inst = Instance::new(&[1.0, 0.9, 0.6, 0.2], &[3, 1, 2, 1], DiscountFunction::table(vec![0.75, 0.5, 0.25])?)?;
    let graph = build_state_graph(&inst, DEFAULT_NODE_CAP)?;
    println!("{} delay states, {} transitions", graph.node_count(), graph.edge_count());

    let opt = max_mean_cycle(&graph)?;
    print!("{opt}");

    let ghost = ghost_summary(&inst);
    println!("best ranking policy pi_{}: {:.6}", ghost.r_star, ghost.ghost_value());
    println!("gap to the optimum: {:.6}", opt.mean - ghost.ghost_value());
    Ok(())
}
