//! Splitting a circuit along a directed edge cut into a preparation part
//! and an observation part, and gluing the two back together.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use super::{Circuit, CircuitError, Endpoint, NodeId, Wire, WireId};

/// The two halves of a circuit cut. Cut wires appear in `preparation` as
/// output boundary wires and in `observation` as input boundary wires,
/// keeping their original ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub preparation: Circuit,
    pub observation: Circuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Prep,
    Obs,
}

/// Split `circuit` along `cut`.
///
/// Removing the cut wires must leave every connected piece entirely on one
/// side, with all cut wires running from the preparation side to the
/// observation side. Pieces not touched by any cut wire go to the
/// observation side.
pub fn split_prep_obs(circuit: &Circuit, cut: &BTreeSet<WireId>) -> Result<Bipartition, CircuitError> {
    let mut cut_wires = Vec::with_capacity(cut.len());
    for id in cut {
        let w = circuit.wire(*id).ok_or(CircuitError::UnknownWire(*id))?;
        let (Endpoint::Port(s), Endpoint::Port(t)) = (&w.source, &w.target) else {
            return Err(CircuitError::InvalidCut(format!("wire {id} is a boundary wire")));
        };
        circuit.require_node(s.node.as_str())?;
        circuit.require_node(t.node.as_str())?;
        cut_wires.push(w);
    }

    // connected components of the graph without the cut wires
    let mut adjacency: BTreeMap<&NodeId, Vec<&NodeId>> = circuit.nodes().map(|n| (&n.id, Vec::new())).collect();
    for w in circuit.wires() {
        if cut.contains(&w.id) {
            continue;
        }
        if let (Endpoint::Port(s), Endpoint::Port(t)) = (&w.source, &w.target) {
            if adjacency.contains_key(&s.node) && adjacency.contains_key(&t.node) {
                adjacency.get_mut(&s.node).unwrap().push(&t.node);
                adjacency.get_mut(&t.node).unwrap().push(&s.node);
            }
        }
    }
    let mut component: BTreeMap<&NodeId, usize> = BTreeMap::new();
    let mut count = 0;
    for start in adjacency.keys() {
        if component.contains_key(start) {
            continue;
        }
        let mut stack = alloc::vec![*start];
        while let Some(n) = stack.pop() {
            if component.insert(n, count).is_none() {
                stack.extend(adjacency[n].iter().copied());
            }
        }
        count += 1;
    }

    let mut side: Vec<Option<Side>> = alloc::vec![None; count];
    let mut assign = |node: &NodeId, s: Side| -> Result<(), CircuitError> {
        let c = component[node];
        match side[c] {
            Some(prev) if prev != s => {
                Err(CircuitError::InvalidCut(format!("node {node} would lie on both sides of the cut")))
            }
            _ => {
                side[c] = Some(s);
                Ok(())
            }
        }
    };
    for w in &cut_wires {
        assign(&w.source.port().unwrap().node, Side::Prep)?;
        assign(&w.target.port().unwrap().node, Side::Obs)?;
    }
    let side_of = |node: &NodeId| side[component[node]].unwrap_or(Side::Obs);

    let mut prep_nodes = Vec::new();
    let mut obs_nodes = Vec::new();
    for n in circuit.nodes() {
        match side_of(&n.id) {
            Side::Prep => prep_nodes.push(n.clone()),
            Side::Obs => obs_nodes.push(n.clone()),
        }
    }

    let mut prep_wires = Vec::new();
    let mut obs_wires = Vec::new();
    for w in circuit.wires() {
        if cut.contains(&w.id) {
            prep_wires.push(Wire { target: Endpoint::Boundary, ..w.clone() });
            obs_wires.push(Wire { source: Endpoint::Boundary, ..w.clone() });
            continue;
        }
        let anchor = w.source.port().or(w.target.port()).map(|p| &p.node);
        match anchor.filter(|n| circuit.contains_node(n.as_str())).map(&side_of) {
            Some(Side::Prep) => prep_wires.push(w.clone()),
            Some(Side::Obs) => obs_wires.push(w.clone()),
            // detached or dangling-to-nowhere wires: keep with the observation side
            None => obs_wires.push(w.clone()),
        }
    }

    let closed = |ws: &[Wire]| ws.iter().all(|w| w.source != Endpoint::Boundary && w.target != Endpoint::Boundary);
    let prep_closed = closed(&prep_wires);
    let obs_closed = closed(&obs_wires);
    Ok(Bipartition {
        preparation: Circuit::new(circuit.systems().clone(), prep_nodes, prep_wires, prep_closed)?,
        observation: Circuit::new(circuit.systems().clone(), obs_nodes, obs_wires, obs_closed)?,
    })
}

/// Glue a preparation and an observation back together, joining output
/// boundary wires of `preparation` to input boundary wires of
/// `observation` with the same id.
pub fn recompose(preparation: &Circuit, observation: &Circuit) -> Result<Circuit, CircuitError> {
    let (systems, prep_nodes, prep_wires) = preparation.clone().into_parts();
    let (_, obs_nodes, obs_wires) = observation.clone().into_parts();

    let mut obs_by_id: BTreeMap<WireId, Wire> = BTreeMap::new();
    for w in obs_wires {
        if obs_by_id.insert(w.id, w.clone()).is_some() {
            return Err(CircuitError::DuplicateWire(w.id));
        }
    }
    let mut wires = Vec::new();
    for w in prep_wires {
        match obs_by_id.remove(&w.id) {
            None => wires.push(w),
            Some(o) if w.target == Endpoint::Boundary && o.source == Endpoint::Boundary => {
                wires.push(Wire { target: o.target, ..w });
            }
            Some(_) => return Err(CircuitError::DuplicateWire(w.id)),
        }
    }
    wires.extend(obs_by_id.into_values());
    let closed = wires.iter().all(|w| w.source != Endpoint::Boundary && w.target != Endpoint::Boundary);
    Circuit::new(systems, prep_nodes.into_values().chain(obs_nodes.into_values()), wires, closed)
}
