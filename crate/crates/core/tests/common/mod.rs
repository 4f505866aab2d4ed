//! Reference implementations written directly from the model definition,
//! independent of the library's own dynamics and solvers.

#![allow(dead_code)]

use std::collections::HashMap;

use b2dep::rng::{stream, Purpose, StreamRng};
use b2dep::{DiscountFunction, Instance};
use rand::Rng;

/// `mu_i(tau)` straight from the payoff law.
pub fn ref_payoff(inst: &Instance, arm: usize, tau: usize) -> f64 {
    let mu = inst.baselines()[arm];
    let d = inst.delays()[arm];
    if (1..=d).contains(&tau) {
        let f = match inst.discount() {
            DiscountFunction::Geometric { gamma } => gamma.powi(tau as i32),
            DiscountFunction::Constant { c } => *c,
            DiscountFunction::Table { values } => values[(tau - 1).min(values.len() - 1)],
        };
        (1.0 - f) * mu
    } else {
        mu
    }
}

/// Delay vector after pulling `arm`.
pub fn ref_advance(taus: &[usize], delays: &[usize], arm: usize) -> Vec<usize> {
    taus.iter()
        .zip(delays)
        .enumerate()
        .map(|(j, (&t, &d))| match () {
            _ if j == arm => 1,
            _ if t == 0 => 0,
            _ if t < d => t + 1,
            _ => 0,
        })
        .collect()
}

/// Best mean over all simple cycles reachable from the zero vector.
pub fn brute_force_rho(inst: &Instance) -> f64 {
    let k = inst.k();
    let delays = inst.delays();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut states = vec![vec![0; k]];
    index.insert(vec![0; k], 0);
    let mut edges: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let s = states[head].clone();
        let mut out = Vec::new();
        for arm in 0..k {
            let w = ref_payoff(inst, arm, s[arm]);
            let next = ref_advance(&s, &delays, arm);
            let id = *index.entry(next.clone()).or_insert_with(|| {
                states.push(next);
                states.len() - 1
            });
            out.push((id, w));
        }
        edges.push(out);
        head += 1;
    }
    let n = states.len();
    let mut best = f64::NEG_INFINITY;
    let mut on_path = vec![false; n];
    for start in 0..n {
        dfs(start, start, 0.0, 0, &edges, &mut on_path, &mut best);
    }
    best
}

fn dfs(
    start: usize,
    u: usize,
    total: f64,
    len: usize,
    edges: &[Vec<(usize, f64)>],
    on_path: &mut [bool],
    best: &mut f64,
) {
    on_path[u] = true;
    for &(v, w) in &edges[u] {
        if v == start {
            *best = best.max((total + w) / (len + 1) as f64);
        } else if v > start && !on_path[v] {
            dfs(start, v, total + w, len + 1, edges, on_path, best);
        }
    }
    on_path[u] = false;
}

/// Random instance with `k <= max_k` arms, delays `<= max_d`, strictly
/// decreasing baselines that are multiples of `1/24`, and a discount that is
/// either geometric or a nonincreasing table of multiples of `1/8`.
pub fn random_instance(rng: &mut StreamRng, max_k: usize, max_d: usize, geometric: bool) -> Instance {
    let k = rng.gen_range(1..=max_k);
    let mut grid: Vec<u32> = (0..=24).collect();
    let mut mu = Vec::with_capacity(k);
    for _ in 0..k {
        let i = rng.gen_range(0..grid.len());
        mu.push(grid.swap_remove(i) as f64 / 24.0);
    }
    mu.sort_by(|a, b| b.total_cmp(a));
    let d: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=max_d)).collect();
    let discount = if geometric {
        DiscountFunction::geometric(rng.gen_range(1..8) as f64 / 8.0).unwrap()
    } else {
        let mut values: Vec<f64> = (0..max_d).map(|_| rng.gen_range(0..=8) as f64 / 8.0).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        DiscountFunction::table(values).unwrap()
    };
    Instance::new(&mu, &d, discount).unwrap()
}

pub fn search_rng(run: u64) -> StreamRng {
    stream(20_240_601, run, Purpose::Search)
}
