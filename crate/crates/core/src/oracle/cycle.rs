//! Maximum mean cycle search.
//!
//! [`karp`] is the classical dynamic program over walk lengths; it is exact
//! when weights are integers and is used for graphs up to
//! [`KARP_NODE_LIMIT`] reachable nodes. [`howard`] is policy iteration on the
//! deterministic average-reward problem and handles larger graphs.

use std::ops::{Add, Sub};

use num_rational::Ratio;

/// Graphs with more reachable nodes than this go to [`howard`].
pub const KARP_NODE_LIMIT: usize = 1500;

/// Comparison slack used by policy iteration.
const HOWARD_EPS: f64 = 1e-12;

/// Directed graph stored as per-node successor lists. An edge is addressed
/// by its position in the source's list (for delay-state graphs the position
/// is the pulled arm).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph<W> {
    succ: Vec<Vec<(usize, W)>>,
}

impl<W: Copy> WeightedDigraph<W> {
    pub fn new(node_count: usize) -> Self {
        Self { succ: vec![Vec::new(); node_count] }
    }

    pub fn from_successors(succ: Vec<Vec<(usize, W)>>) -> Self {
        assert!(succ.iter().flatten().all(|(v, _)| *v < succ.len()), "edge target out of range");
        Self { succ }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, weight: W) {
        assert!(to < self.succ.len());
        self.succ[from].push((to, weight));
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, node: usize) -> &[(usize, W)] {
        &self.succ[node]
    }

    /// Nodes reachable from `start`, in BFS order (`start` first).
    pub fn reachable_from(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.succ.len()];
        let mut order = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &(v, _) in &self.succ[u] {
                if !seen[v] {
                    seen[v] = true;
                    order.push(v);
                }
            }
        }
        order
    }

    pub fn map_weights<V: Copy>(&self, mut f: impl FnMut(W) -> V) -> WeightedDigraph<V> {
        WeightedDigraph {
            succ: self.succ.iter().map(|edges| edges.iter().map(|&(v, w)| (v, f(w))).collect()).collect(),
        }
    }
}

/// Edge weights the dynamic program can add, subtract and average.
pub trait CycleWeight: Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> {
    type Mean: Copy + PartialOrd + std::fmt::Debug;
    fn zero() -> Self;
    fn mean(total: Self, len: usize) -> Self::Mean;
}

impl CycleWeight for f64 {
    type Mean = f64;
    fn zero() -> Self {
        0.0
    }
    fn mean(total: Self, len: usize) -> f64 {
        total / len as f64
    }
}

impl CycleWeight for i64 {
    type Mean = Ratio<i64>;
    fn zero() -> Self {
        0
    }
    fn mean(total: Self, len: usize) -> Ratio<i64> {
        Ratio::new(total, len as i64)
    }
}

/// A cycle and its mean weight.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCycle<M> {
    pub mean: M,
    /// Nodes in traversal order; the edge `edges[i]` leaves `nodes[i]`.
    pub nodes: Vec<usize>,
    /// Edge positions within each source's successor list.
    pub edges: Vec<usize>,
}

/// Maximum mean cycle among cycles reachable from `start`, by Karp's
/// recurrence. Returns `None` when no cycle is reachable.
///
/// Uses `O(n^2)` memory in the number of reachable nodes.
pub fn karp<W: CycleWeight>(graph: &WeightedDigraph<W>, start: usize) -> Option<MeanCycle<W::Mean>> {
    let order = graph.reachable_from(start);
    let n = order.len();
    let mut local = vec![usize::MAX; graph.node_count()];
    for (i, &v) in order.iter().enumerate() {
        local[v] = i;
    }

    // best[k][v]: heaviest walk of exactly k edges from start to v.
    let mut best: Vec<Vec<Option<W>>> = vec![vec![None; n]; n + 1];
    let mut pred: Vec<Vec<(u32, u32)>> = vec![vec![(u32::MAX, u32::MAX); n]; n + 1];
    best[0][0] = Some(W::zero());
    for k in 1..=n {
        let (done, rest) = best.split_at_mut(k);
        let prev = &done[k - 1];
        let cur = &mut rest[0];
        for u in 0..n {
            let Some(du) = prev[u] else { continue };
            for (pos, &(v, w)) in graph.successors(order[u]).iter().enumerate() {
                let v = local[v];
                let cand = du + w;
                if cur[v].is_none_or(|c| cand > c) {
                    cur[v] = Some(cand);
                    pred[k][v] = (u as u32, pos as u32);
                }
            }
        }
    }

    let mut winner: Option<(W::Mean, usize)> = None;
    for (v, dn) in best[n].iter().enumerate() {
        let Some(dn) = *dn else { continue };
        let worst = (0..n).filter_map(|k| best[k][v].map(|dk| W::mean(dn - dk, n - k))).fold(
            None,
            |acc: Option<W::Mean>, m| match acc {
                Some(a) if a <= m => Some(a),
                _ => Some(m),
            },
        );
        if let Some(m) = worst {
            if winner.as_ref().is_none_or(|(b, _)| m > *b) {
                winner = Some((m, v));
            }
        }
    }
    let (_, v_star) = winner?;

    // Walk back the n-edge path into v_star; any cycle on it is optimal.
    let mut walk_nodes = vec![v_star];
    let mut walk_edges = Vec::with_capacity(n);
    let mut v = v_star;
    for k in (1..=n).rev() {
        let (u, pos) = pred[k][v];
        walk_edges.push(pos as usize);
        v = u as usize;
        walk_nodes.push(v);
    }
    walk_nodes.reverse();
    walk_edges.reverse();
    // walk_nodes[i] --walk_edges[i]--> walk_nodes[i + 1]
    let mut last_seen = vec![usize::MAX; n];
    for (i, &node) in walk_nodes.iter().enumerate() {
        if last_seen[node] != usize::MAX {
            let from = last_seen[node];
            let nodes: Vec<usize> = walk_nodes[from..i].iter().map(|&x| order[x]).collect();
            let edges = walk_edges[from..i].to_vec();
            let total = nodes.iter().zip(&edges).fold(W::zero(), |acc, (&x, &e)| acc + graph.successors(x)[e].1);
            let mean = W::mean(total, nodes.len());
            return Some(MeanCycle { mean, nodes, edges });
        }
        last_seen[node] = i;
    }
    unreachable!("a walk of n edges over n nodes repeats a node")
}

/// Maximum mean cycle reachable from `start` by Howard's policy iteration.
/// Every reachable node must have at least one outgoing edge.
pub fn howard(graph: &WeightedDigraph<f64>, start: usize) -> Option<MeanCycle<f64>> {
    let order = graph.reachable_from(start);
    let n = order.len();
    let mut local = vec![usize::MAX; graph.node_count()];
    for (i, &v) in order.iter().enumerate() {
        local[v] = i;
    }
    let edges: Vec<Vec<(usize, f64)>> =
        order.iter().map(|&u| graph.successors(u).iter().map(|&(v, w)| (local[v], w)).collect()).collect();
    if edges.iter().any(Vec::is_empty) {
        return None;
    }

    let mut policy: Vec<usize> = edges
        .iter()
        .map(|out| {
            let mut best = 0;
            for (i, e) in out.iter().enumerate() {
                if e.1 > out[best].1 {
                    best = i;
                }
            }
            best
        })
        .collect();
    let mut eta = vec![0.0; n];
    let mut bias = vec![0.0; n];

    for _ in 0..10_000 {
        evaluate(&edges, &policy, &mut eta, &mut bias);
        let mut changed = false;
        for u in 0..n {
            let mut best = policy[u];
            let mut best_eta = eta[edges[u][best].0];
            for (i, &(v, _)) in edges[u].iter().enumerate() {
                if eta[v] > best_eta + HOWARD_EPS {
                    best = i;
                    best_eta = eta[v];
                }
            }
            if best != policy[u] && best_eta > eta[u] + HOWARD_EPS {
                policy[u] = best;
                changed = true;
            }
        }
        if changed {
            continue;
        }
        for u in 0..n {
            let mut best = policy[u];
            let mut best_val = bias[u];
            for (i, &(v, w)) in edges[u].iter().enumerate() {
                if (eta[v] - eta[u]).abs() <= HOWARD_EPS {
                    let val = w - eta[u] + bias[v];
                    if val > best_val + HOWARD_EPS {
                        best = i;
                        best_val = val;
                    }
                }
            }
            if best != policy[u] {
                policy[u] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let top = (0..n).max_by(|&a, &b| eta[a].total_cmp(&eta[b]).then(b.cmp(&a)))?;
    // Follow the policy from the best node until the cycle closes.
    let mut seen = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut u = top;
    while seen[u] == usize::MAX {
        seen[u] = path.len();
        path.push(u);
        u = edges[u][policy[u]].0;
    }
    let cycle_local = &path[seen[u]..];
    let nodes: Vec<usize> = cycle_local.iter().map(|&x| order[x]).collect();
    let cyc_edges: Vec<usize> = cycle_local.iter().map(|&x| policy[x]).collect();
    let total: f64 = cycle_local.iter().map(|&x| edges[x][policy[x]].1).sum();
    Some(MeanCycle { mean: total / nodes.len() as f64, nodes, edges: cyc_edges })
}

/// Cycle means `eta` and relative values `bias` of a fixed policy.
fn evaluate(edges: &[Vec<(usize, f64)>], policy: &[usize], eta: &mut [f64], bias: &mut [f64]) {
    let n = policy.len();
    let next = |u: usize| edges[u][policy[u]];
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut mark = vec![0u8; n];
    let mut path = Vec::new();
    for s in 0..n {
        if mark[s] != 0 {
            continue;
        }
        path.clear();
        let mut u = s;
        while mark[u] == 0 {
            mark[u] = 1;
            path.push(u);
            u = next(u).0;
        }
        let mut tail_end = path.len();
        if mark[u] == 1 {
            // New cycle starting at u.
            let start = path.iter().position(|&x| x == u).unwrap();
            let cycle = &path[start..];
            let mean = cycle.iter().map(|&x| next(x).1).sum::<f64>() / cycle.len() as f64;
            bias[u] = 0.0;
            eta[u] = mean;
            for &x in cycle[1..].iter().rev() {
                let (v, w) = next(x);
                eta[x] = mean;
                bias[x] = w - mean + bias[v];
            }
            for &x in cycle {
                mark[x] = 2;
            }
            tail_end = start;
        }
        for &x in path[..tail_end].iter().rev() {
            let (v, w) = next(x);
            eta[x] = eta[v];
            bias[x] = w - eta[v] + bias[v];
            mark[x] = 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_loop_and_two_cycle() {
        let g = WeightedDigraph::from_successors(vec![vec![(0, 0.37)]]);
        assert_eq!(karp(&g, 0).unwrap().mean, 0.37);
        assert_eq!(howard(&g, 0).unwrap().mean, 0.37);

        let g = WeightedDigraph::from_successors(vec![vec![(1, 0.2)], vec![(0, 0.9)]]);
        let c = karp(&g, 0).unwrap();
        assert!((c.mean - 0.55).abs() < 1e-15);
        assert_eq!(c.nodes.len(), 2);
        assert!((howard(&g, 0).unwrap().mean - 0.55).abs() < 1e-15);
    }

    #[test]
    fn unreachable_cycles_are_ignored() {
        // 0 -> 1 -> 1 (weight 0.1); 2 -> 2 (weight 0.9) is unreachable.
        let g = WeightedDigraph::from_successors(vec![vec![(1, 0.5)], vec![(1, 0.1)], vec![(2, 0.9)]]);
        assert!((karp(&g, 0).unwrap().mean - 0.1).abs() < 1e-15);
        assert!((howard(&g, 0).unwrap().mean - 0.1).abs() < 1e-15);
    }

    #[test]
    fn acyclic_graph_has_no_cycle() {
        let g = WeightedDigraph::from_successors(vec![vec![(1, 0.5)], vec![]]);
        assert!(karp(&g, 0).is_none());
        assert!(howard(&g, 0).is_none());
    }

    #[test]
    fn integer_weights_give_exact_means() {
        let g = WeightedDigraph::from_successors(vec![vec![(1, 1i64)], vec![(2, 0)], vec![(0, 1), (2, 0)]]);
        let c = karp(&g, 0).unwrap();
        assert_eq!(c.mean, Ratio::new(2, 3));
    }
}
