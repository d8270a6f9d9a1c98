//! The causal partial order: `a` precedes `b` when a directed path of wires
//! leads from an output port of `a` to an input port of `b`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{Circuit, CircuitError, Endpoint, NodeId};

/// Direct successors of every node (wires oriented output → input).
/// Boundary endpoints and wires to unknown nodes are ignored.
pub(super) fn successor_map(circuit: &Circuit) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
    let mut succ: BTreeMap<NodeId, BTreeSet<NodeId>> =
        circuit.nodes().map(|n| (n.id.clone(), BTreeSet::new())).collect();
    for w in circuit.wires() {
        if let (Endpoint::Port(s), Endpoint::Port(t)) = (&w.source, &w.target) {
            if circuit.contains_node(t.node.as_str()) {
                if let Some(set) = succ.get_mut(&s.node) {
                    set.insert(t.node.clone());
                }
            }
        }
    }
    succ
}

fn reachable(succ: &BTreeMap<NodeId, BTreeSet<NodeId>>, from: &NodeId) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<&NodeId> = succ.get(from).into_iter().flatten().collect();
    while let Some(n) = stack.pop() {
        if seen.insert(n.clone()) {
            stack.extend(succ.get(n).into_iter().flatten());
        }
    }
    seen
}

fn invert(succ: &BTreeMap<NodeId, BTreeSet<NodeId>>) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
    let mut pred: BTreeMap<NodeId, BTreeSet<NodeId>> = succ.keys().map(|k| (k.clone(), BTreeSet::new())).collect();
    for (s, targets) in succ {
        for t in targets {
            pred.entry(t.clone()).or_default().insert(s.clone());
        }
    }
    pred
}

/// Whether `a` precedes `b`. Irreflexive on acyclic circuits.
pub fn precedes(circuit: &Circuit, a: &str, b: &str) -> Result<bool, CircuitError> {
    let a = circuit.require_node(a)?.id.clone();
    let b = circuit.require_node(b)?.id.clone();
    Ok(reachable(&successor_map(circuit), &a).contains(&b))
}

/// Nodes preceding `a` (its input cone).
pub fn past_cone(circuit: &Circuit, a: &str) -> Result<BTreeSet<NodeId>, CircuitError> {
    let a = circuit.require_node(a)?.id.clone();
    Ok(reachable(&invert(&successor_map(circuit)), &a))
}

/// Nodes following `a` (its output cone).
pub fn future_cone(circuit: &Circuit, a: &str) -> Result<BTreeSet<NodeId>, CircuitError> {
    let a = circuit.require_node(a)?.id.clone();
    Ok(reachable(&successor_map(circuit), &a))
}

/// Kahn's algorithm, always releasing the lexicographically smallest ready node.
pub fn topological_order(circuit: &Circuit) -> Result<Vec<NodeId>, CircuitError> {
    let succ = successor_map(circuit);
    let mut indegree: BTreeMap<&NodeId, usize> = succ.keys().map(|k| (k, 0)).collect();
    for targets in succ.values() {
        for t in targets {
            *indegree.get_mut(t).expect("successor is a node") += 1;
        }
    }
    let mut ready: BTreeSet<&NodeId> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
    let mut order = Vec::with_capacity(succ.len());
    while let Some(n) = ready.pop_first() {
        order.push(n.clone());
        for t in &succ[n] {
            let d = indegree.get_mut(t).expect("successor is a node");
            *d -= 1;
            if *d == 0 {
                ready.insert(t);
            }
        }
    }
    if order.len() != succ.len() {
        let done: BTreeSet<&NodeId> = order.iter().collect();
        let rest = succ.keys().filter(|k| !done.contains(k)).cloned().collect();
        return Err(CircuitError::Cycle(rest));
    }
    Ok(order)
}

/// Precomputed past and future cones for every node, for repeated queries
/// on the same circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalOrder {
    future: BTreeMap<NodeId, BTreeSet<NodeId>>,
    past: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl CausalOrder {
    pub fn new(circuit: &Circuit) -> Self {
        let succ = successor_map(circuit);
        let pred = invert(&succ);
        let future = succ.keys().map(|k| (k.clone(), reachable(&succ, k))).collect();
        let past = pred.keys().map(|k| (k.clone(), reachable(&pred, k))).collect();
        CausalOrder { future, past }
    }

    pub fn precedes(&self, a: &str, b: &str) -> Result<bool, CircuitError> {
        let fut = self.future.get(a).ok_or_else(|| CircuitError::UnknownNode(a.into()))?;
        if !self.future.contains_key(b) {
            return Err(CircuitError::UnknownNode(b.into()));
        }
        Ok(fut.contains(b))
    }

    pub fn past_cone(&self, a: &str) -> Result<&BTreeSet<NodeId>, CircuitError> {
        self.past.get(a).ok_or_else(|| CircuitError::UnknownNode(a.into()))
    }

    pub fn future_cone(&self, a: &str) -> Result<&BTreeSet<NodeId>, CircuitError> {
        self.future.get(a).ok_or_else(|| CircuitError::UnknownNode(a.into()))
    }
}
