use crate::error::{Error, Result};
use crate::model::{DelayState, Instance};
use crate::oracle::cycle::WeightedDigraph;

/// Default bound on the number of delay vectors the oracle will enumerate.
pub const DEFAULT_NODE_CAP: usize = 1_000_000;

/// Deterministic transition graph over every delay vector. Node ids are the
/// mixed-radix codes of [`DelayState::encode`]; the edge at position `a` of a
/// node's successor list is "pull arm `a`", weighted by its expected payoff.
#[derive(Debug, Clone)]
pub struct StateGraph {
    graph: WeightedDigraph<f64>,
    instance: Instance,
}

impl StateGraph {
    pub fn graph(&self) -> &WeightedDigraph<f64> {
        &self.graph
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Node id of the all-zero delay vector.
    pub fn start(&self) -> usize {
        0
    }

    pub fn state(&self, node: usize) -> DelayState {
        DelayState::decode(node, &self.instance)
    }
}

/// Builds the full graph, refusing state spaces larger than `node_cap`.
pub fn build_state_graph(instance: &Instance, node_cap: usize) -> Result<StateGraph> {
    let nodes = instance.state_space_size();
    if nodes > node_cap as u128 {
        return Err(Error::StateSpaceTooLarge { nodes, cap: node_cap });
    }
    let n = nodes as usize;
    let k = instance.k();
    let mut succ = Vec::with_capacity(n);
    for code in 0..n {
        let state = DelayState::decode(code, instance);
        let mut out = Vec::with_capacity(k);
        for arm in 0..k {
            let weight = instance.mean(arm, state.tau(arm));
            let next = state.advance(arm, instance)?;
            out.push((next.encode(instance), weight));
        }
        succ.push(out);
    }
    Ok(StateGraph { graph: WeightedDigraph::from_successors(succ), instance: instance.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiscountFunction;

    fn inst(mu: &[f64], d: &[usize]) -> Instance {
        Instance::relaxed(mu, d, DiscountFunction::constant(0.5).unwrap()).unwrap()
    }

    #[test]
    fn sizes() {
        let g = build_state_graph(&inst(&[0.5], &[1]), 10).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 2));
        let g = build_state_graph(&inst(&[0.5, 0.4], &[1, 1]), 10).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 8));
        let g = build_state_graph(&inst(&[0.5, 0.4, 0.3], &[2, 2, 2]), 100).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (27, 81));
    }

    #[test]
    fn cap_is_enforced() {
        let err = build_state_graph(&inst(&[0.5, 0.4, 0.3], &[2, 2, 2]), 26).unwrap_err();
        assert!(matches!(err, Error::StateSpaceTooLarge { nodes: 27, cap: 26 }));
    }

    #[test]
    fn edges_follow_the_dynamics() {
        let i = inst(&[1.0, 0.4], &[1, 1]);
        let g = build_state_graph(&i, 10).unwrap();
        for u in 0..g.node_count() {
            let s = g.state(u);
            for (arm, &(v, w)) in g.graph().successors(u).iter().enumerate() {
                assert_eq!(g.state(v), s.advance(arm, &i).unwrap());
                assert_eq!(w, i.mean(arm, s.tau(arm)));
            }
        }
    }
}
