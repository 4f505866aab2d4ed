mod common;

use b2dep::harness::{aggregate, RegretCurve, RegretRow};
use b2dep::low_switch::run_low_switch;
use b2dep::oracle::{
    alternation_value, howard, karp, optimal_average, pmsp_feasible, pmsp_threshold, pmsp_to_b2dep, PmspInstance,
    WeightedDigraph,
};
use b2dep::policies::{greedy_arm, rollout, CyclicSequence, RankingPolicy};
use b2dep::ranker::{rank_arms, CalibratedSampler, IidSampler, DEFAULT_PULL_CAP};
use b2dep::rng::{stream, Purpose};
use b2dep::ucb::run_ucb_rankings;
use b2dep::{ghost_summary, DelayState, Environment, Instance};
use common::{random_instance, ref_advance, search_rng};
use proptest::prelude::*;
use rand::Rng;

fn instance(seed: u64, max_k: usize, max_d: usize) -> Instance {
    let mut rng = search_rng(seed);
    let geometric = rng.gen_bool(0.5);
    random_instance(&mut rng, max_k, max_d, geometric)
}

/// Best simple-cycle mean reachable from `start`, by enumeration.
fn brute_cycle_mean(succ: &[Vec<(usize, f64)>], start: usize) -> Option<f64> {
    let n = succ.len();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &(v, _) in &succ[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    let mut best: Option<f64> = None;
    let mut on_path = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn walk(
        s: usize,
        u: usize,
        total: f64,
        len: usize,
        succ: &[Vec<(usize, f64)>],
        seen: &[bool],
        on_path: &mut [bool],
        best: &mut Option<f64>,
    ) {
        on_path[u] = true;
        for &(v, w) in &succ[u] {
            if v == s {
                let m = (total + w) / (len + 1) as f64;
                *best = Some(best.map_or(m, |b| b.max(m)));
            } else if v > s && seen[v] && !on_path[v] {
                walk(s, v, total + w, len + 1, succ, seen, on_path, best);
            }
        }
        on_path[u] = false;
    }
    for s in (0..n).filter(|&s| seen[s]) {
        walk(s, s, 0.0, 0, succ, &seen, &mut on_path, &mut best);
    }
    best
}

fn random_graph(seed: u64, nodes: usize, min_out: usize) -> Vec<Vec<(usize, f64)>> {
    let mut rng = stream(seed, 0, Purpose::Search);
    (0..nodes)
        .map(|_| {
            let out = rng.gen_range(min_out..=3);
            (0..out).map(|_| (rng.gen_range(0..nodes), rng.gen_range(0..=16) as f64 / 16.0)).collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn delay_state_stays_capped(seed in 0u64..10_000, pulls in proptest::collection::vec(0usize..6, 1..40)) {
        let inst = instance(seed, 6, 4);
        let delays = inst.delays();
        let mut state = DelayState::zero(inst.k());
        let mut reference = vec![0; inst.k()];
        for p in pulls {
            let arm = p % inst.k();
            state = state.advance(arm, &inst).unwrap();
            reference = ref_advance(&reference, &delays, arm);
            prop_assert_eq!(state.as_slice(), &reference[..]);
            for (t, d) in state.as_slice().iter().zip(&delays) {
                prop_assert!(t <= d);
            }
            prop_assert_eq!(DelayState::decode(state.encode(&inst), &inst), state.clone());
        }
    }

    #[test]
    fn greedy_and_best_ranking_ignore_scale(seed in 0u64..10_000, scale in 1u32..8, pulls in proptest::collection::vec(0usize..5, 0..12)) {
        let inst = instance(seed, 5, 3);
        let c = scale as f64 / 8.0;
        let mu: Vec<f64> = inst.baselines().iter().map(|m| m * c).collect();
        let Ok(scaled) = Instance::new(&mu, &inst.delays(), inst.discount().clone()) else {
            // Scaling can merge baselines that must stay strictly ordered.
            return Ok(());
        };
        let mut state = DelayState::zero(inst.k());
        for p in pulls {
            state.step(p % inst.k(), &inst);
        }
        let a = greedy_arm(&inst, &state);
        let b = greedy_arm(&scaled, &state);
        prop_assert!(a == b || (inst.mean(a, state.tau(a)) - inst.mean(b, state.tau(b))).abs() < 1e-12);
        let (ga, gb) = (ghost_summary(&inst), ghost_summary(&scaled));
        prop_assert_eq!(ga.r_star, gb.r_star);
        prop_assert_eq!(ga.r_zero, gb.r_zero);
    }

    #[test]
    fn best_ranking_dominates_and_optimum_dominates_it(seed in 0u64..10_000) {
        let inst = instance(seed, 4, 3);
        let s = ghost_summary(&inst);
        for &g in &s.g_values {
            prop_assert!(s.ghost_value() >= g - 1e-12);
        }
        let opt = optimal_average(&inst).unwrap();
        prop_assert!(opt.mean >= s.ghost_value() - 1e-12);
        for m in 1..=inst.k() {
            for n in 1..=inst.k() {
                prop_assert!(opt.mean >= alternation_value(&inst, m, n).unwrap() - 1e-12);
            }
        }
    }

    #[test]
    fn karp_matches_enumeration(seed in 0u64..1_000_000, nodes in 1usize..30) {
        let succ = random_graph(seed, nodes, 0);
        let g = WeightedDigraph::from_successors(succ.clone());
        let brute = brute_cycle_mean(&succ, 0);
        let fast = karp(&g, 0);
        prop_assert_eq!(brute.is_some(), fast.is_some());
        if let (Some(b), Some(c)) = (brute, fast) {
            prop_assert!((b - c.mean).abs() < 1e-12, "enumeration {} karp {}", b, c.mean);
            let w: f64 = c.nodes.iter().zip(&c.edges).map(|(&u, &e)| succ[u][e].1).sum();
            prop_assert!((w / c.nodes.len() as f64 - c.mean).abs() < 1e-12);
        }
    }

    // Policy iteration needs an out-edge at every node, as in state graphs.
    #[test]
    fn howard_matches_karp(seed in 0u64..1_000_000, nodes in 1usize..60) {
        let g = WeightedDigraph::from_successors(random_graph(seed, nodes, 1));
        let a = karp(&g, 0).map(|c| c.mean);
        let b = howard(&g, 0).map(|c| c.mean);
        prop_assert_eq!(a.is_some(), b.is_some());
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert!((a - b).abs() < 1e-9, "karp {} howard {}", a, b);
        }
    }

    #[test]
    fn scheduling_feasibility_matches_reduced_optimum(intervals in proptest::collection::vec(2u64..7, 1..4)) {
        let Ok(p) = PmspInstance::new(intervals) else { return Ok(()) };
        let verdict = pmsp_feasible(&p, 10_000).unwrap();
        let opt = optimal_average(&pmsp_to_b2dep(&p).unwrap()).unwrap();
        let reaches = opt.exact.expect("reduced weights are rational") >= pmsp_threshold(&p);
        prop_assert_eq!(reaches, verdict.feasible);
        if let Some(schedule) = verdict.schedule {
            for (i, &l) in p.intervals().iter().enumerate() {
                let hits: Vec<usize> = (0..schedule.len()).filter(|&t| schedule[t] == Some(i)).collect();
                prop_assert!(!hits.is_empty());
                for w in hits.windows(2) {
                    prop_assert_eq!((w[1] - w[0]) as u64, l);
                }
                prop_assert_eq!((hits[0] + schedule.len() - hits[hits.len() - 1]) as u64, l);
            }
        }
    }

    #[test]
    fn low_switch_respects_switch_bound(seed in 0u64..10_000, horizon in 50u64..5_000) {
        let inst = instance(seed, 5, 3);
        let mut env = Environment::seeded(inst, seed, 0);
        let run = run_low_switch(&mut env, horizon, 0.1).unwrap();
        prop_assert_eq!(run.trace.len() as u64, horizon);
        prop_assert!(run.switches <= run.schedule.switch_bound());
        prop_assert_eq!(run.switches, run.trace.switches());
        for w in run.stages.windows(2) {
            prop_assert!(w[1].active.iter().all(|m| w[0].active.contains(m)));
        }
    }

    #[test]
    fn noiseless_stage_keeps_exactly_the_near_best(seed in 0u64..10_000) {
        let inst = instance(seed, 5, 3);
        let g = ghost_summary(&inst).g_values;
        let mut env = Environment::noiseless(inst);
        let run = run_low_switch(&mut env, 20_000, 0.1).unwrap();
        let first = &run.stages[0];
        prop_assume!(first.complete);
        for (slot, &m) in first.active.iter().enumerate() {
            prop_assert!((first.estimates[slot] - g[m - 1]).abs() < 1e-9);
        }
        let top = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let cut = top - 2.0 * first.radius;
        prop_assume!(g.iter().all(|v| (v - cut).abs() > 1e-9));
        let expected: Vec<usize> = (1..=g.len()).filter(|&m| g[m - 1] >= cut).collect();
        let kept: Vec<usize> = first.active.iter().copied().filter(|m| !first.eliminated.contains(m)).collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn ranker_output_is_a_permutation(seed in 0u64..10_000, k in 2usize..7) {
        let mut rng = stream(seed, 0, Purpose::Search);
        let means: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut sampler = IidSampler::bernoulli(means, stream(seed, 0, Purpose::Ranking));
        let out = rank_arms(&mut sampler, 0.1, 20_000).unwrap();
        let mut sorted = out.permutation.clone();
        sorted.sort();
        prop_assert_eq!(sorted, (0..k).collect::<Vec<_>>());
    }

    #[test]
    fn zero_variance_ranker_is_exact(seed in 0u64..10_000, k in 2usize..7) {
        let mut rng = stream(seed, 0, Purpose::Search);
        let mut grid: Vec<u32> = (0..=20).collect();
        let means: Vec<f64> = (0..k).map(|_| grid.swap_remove(rng.gen_range(0..grid.len())) as f64 / 20.0).collect();
        let mut sampler = IidSampler::exact(means.clone(), stream(seed, 0, Purpose::Ranking));
        let out = rank_arms(&mut sampler, 0.1, DEFAULT_PULL_CAP).unwrap();
        prop_assert!(out.complete);
        let mut expected: Vec<usize> = (0..k).collect();
        expected.sort_by(|&a, &b| means[b].total_cmp(&means[a]));
        prop_assert_eq!(out.permutation, expected);
    }

    #[test]
    fn calibrated_samples_sit_at_baseline(seed in 0u64..10_000, extra in 1usize..3) {
        let inst = instance(seed, 5, 3);
        prop_assume!(inst.k() >= 2);
        let d0 = inst.max_delay() + extra;
        let env = Environment::seeded(inst.clone(), seed, 0);
        let mut sampler = CalibratedSampler::new(env, d0).unwrap();
        let out = rank_arms(&mut sampler, 0.1, 5_000).unwrap();
        prop_assert!(!sampler.retained().is_empty());
        for r in sampler.retained() {
            prop_assert_eq!(r.tau, 0);
            prop_assert_eq!(r.gap, d0);
        }
        prop_assert_eq!(out.pulls, sampler.env().pulls());
    }

    #[test]
    fn ucb_pairs_are_realigned(seed in 0u64..10_000, horizon in 10u64..3_000) {
        let inst = instance(seed, 4, 3);
        let mut env = Environment::seeded(inst.clone(), seed, 0);
        let run = run_ucb_rankings(&mut env, horizon).unwrap();
        prop_assert_eq!(run.trace.len() as u64, horizon);
        let mut t = 0;
        for &m in &run.selections {
            for step in run.trace.steps().iter().skip(t + m).take(m) {
                // Second roll-out: each arm was last pulled m steps ago.
                let arm = step.sample.arm;
                let tau = if m <= inst.delay(arm) { m } else { 0 };
                prop_assert_eq!(step.sample.tau, tau);
                prop_assert!(step.retained);
            }
            t += 2 * m;
        }
    }

    #[test]
    fn rollouts_are_reproducible(seed in 0u64..10_000, m in 1usize..5) {
        let inst = instance(seed, 4, 3);
        let m = m.min(inst.k());
        let run = |s: u64| {
            let mut env = Environment::seeded(inst.clone(), s, 0);
            rollout(&mut env, &mut RankingPolicy::new(m, &inst).unwrap(), 300)
        };
        prop_assert_eq!(run(seed), run(seed));
        let mut env = Environment::noiseless(inst.clone());
        let seq: Vec<usize> = (0..m).collect();
        let trace = rollout(&mut env, &mut CyclicSequence::new(seq, &inst).unwrap(), 300);
        prop_assert_eq!(trace.total_expected(), trace.total_realized());
    }

    #[test]
    fn aggregate_is_the_pointwise_mean(values in proptest::collection::vec(proptest::collection::vec(-50.0f64..50.0, 5), 1..6)) {
        let curves: Vec<RegretCurve> = values
            .iter()
            .map(|v| RegretCurve {
                rows: v
                    .iter()
                    .enumerate()
                    .map(|(i, &r)| RegretRow { t: i as u64 + 1, cum_expected: 0.0, cum_realized: 0.0, switches: 0, regret: r })
                    .collect(),
            })
            .collect();
        let refs: Vec<&RegretCurve> = curves.iter().collect();
        let rows = aggregate(&refs).unwrap();
        for (i, row) in rows.iter().enumerate() {
            let col: Vec<f64> = values.iter().map(|v| v[i]).collect();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / col.len() as f64;
            prop_assert!((row.mean_regret - mean).abs() < 1e-9);
            prop_assert!((row.std_regret - var.sqrt()).abs() < 1e-9);
            prop_assert_eq!(row.n_runs, col.len());
        }
    }
}
