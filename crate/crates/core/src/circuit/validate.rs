use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{Circuit, Endpoint, NodeId, WireId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PortDirection {
    Input,
    Output,
}

impl fmt::Display for PortDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PortDirection::Input => "input",
            PortDirection::Output => "output",
        })
    }
}

/// One structural defect of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    EmptyOutcomeSpace { node: NodeId },
    UnknownSystem { context: String, system: String },
    UnknownNode { wire: WireId, node: NodeId },
    PortOutOfRange { wire: WireId, node: NodeId, direction: PortDirection, port: usize },
    SystemMismatch { wire: WireId, wire_system: String, port_system: String },
    DetachedWire { wire: WireId },
    BoundaryInClosedCircuit { wire: WireId },
    DanglingPort { node: NodeId, direction: PortDirection, port: usize },
    DoubleAttachedPort { node: NodeId, direction: PortDirection, port: usize, wires: Vec<WireId> },
    Cycle { nodes: Vec<NodeId> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyOutcomeSpace { node } => {
                write!(f, "empty outcome space: node {node} declares 0 outcomes")
            }
            Violation::UnknownSystem { context, system } => {
                write!(f, "unknown system: `{system}` used by {context}")
            }
            Violation::UnknownNode { wire, node } => {
                write!(f, "unknown node: wire {wire} references `{node}`")
            }
            Violation::PortOutOfRange { wire, node, direction, port } => {
                write!(f, "port out of range: wire {wire} references {direction} port {node}.{port}")
            }
            Violation::SystemMismatch { wire, wire_system, port_system } => {
                write!(f, "system mismatch: wire {wire} carries `{wire_system}` but port expects `{port_system}`")
            }
            Violation::DetachedWire { wire } => {
                write!(f, "detached wire: wire {wire} has no node at either end")
            }
            Violation::BoundaryInClosedCircuit { wire } => {
                write!(f, "boundary wire in closed circuit: wire {wire}")
            }
            Violation::DanglingPort { node, direction, port } => {
                write!(f, "dangling port: {direction} port {node}.{port} has no wire")
            }
            Violation::DoubleAttachedPort { node, direction, port, wires } => {
                write!(f, "double-attached port: {direction} port {node}.{port} has wires ")?;
                for (i, w) in wires.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
            Violation::Cycle { nodes } => {
                f.write_str("cycle: through nodes ")?;
                for (i, n) in nodes.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{n}")?;
                }
                Ok(())
            }
        }
    }
}

/// All violations found in a circuit; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| alloc::format!("{v}").contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Report every structural violation of `circuit`. Violations are data:
/// this never fails.
pub fn validate(circuit: &Circuit) -> ValidationReport {
    let mut violations = Vec::new();
    let systems = circuit.systems();

    for node in circuit.nodes() {
        if node.outcomes == 0 {
            violations.push(Violation::EmptyOutcomeSpace { node: node.id.clone() });
        }
        for (dir, ports) in [(PortDirection::Input, &node.inputs), (PortDirection::Output, &node.outputs)] {
            for (i, sys) in ports.iter().enumerate() {
                if !systems.contains(sys) {
                    violations.push(Violation::UnknownSystem {
                        context: alloc::format!("{dir} port {}.{i}", node.id),
                        system: sys.clone(),
                    });
                }
            }
        }
    }

    let mut attached: BTreeMap<(NodeId, PortDirection, usize), Vec<WireId>> = BTreeMap::new();
    for wire in circuit.wires() {
        if !systems.contains(&wire.system) {
            violations.push(Violation::UnknownSystem {
                context: alloc::format!("wire {}", wire.id),
                system: wire.system.clone(),
            });
        }
        if wire.source == Endpoint::Boundary && wire.target == Endpoint::Boundary {
            violations.push(Violation::DetachedWire { wire: wire.id });
        } else if circuit.is_closed() && (wire.source == Endpoint::Boundary || wire.target == Endpoint::Boundary) {
            violations.push(Violation::BoundaryInClosedCircuit { wire: wire.id });
        }
        for (dir, end) in [(PortDirection::Output, &wire.source), (PortDirection::Input, &wire.target)] {
            let Endpoint::Port(p) = end else { continue };
            let Some(node) = circuit.node(p.node.as_str()) else {
                violations.push(Violation::UnknownNode { wire: wire.id, node: p.node.clone() });
                continue;
            };
            let ports = match dir {
                PortDirection::Input => &node.inputs,
                PortDirection::Output => &node.outputs,
            };
            let Some(port_system) = ports.get(p.port) else {
                violations.push(Violation::PortOutOfRange {
                    wire: wire.id,
                    node: p.node.clone(),
                    direction: dir,
                    port: p.port,
                });
                continue;
            };
            if *port_system != wire.system {
                violations.push(Violation::SystemMismatch {
                    wire: wire.id,
                    wire_system: wire.system.clone(),
                    port_system: port_system.clone(),
                });
            }
            attached.entry((p.node.clone(), dir, p.port)).or_default().push(wire.id);
        }
    }

    for node in circuit.nodes() {
        for (dir, width) in [(PortDirection::Input, node.inputs.len()), (PortDirection::Output, node.outputs.len())] {
            for port in 0..width {
                match attached.get(&(node.id.clone(), dir, port)) {
                    None => violations.push(Violation::DanglingPort { node: node.id.clone(), direction: dir, port }),
                    Some(ws) if ws.len() > 1 => violations.push(Violation::DoubleAttachedPort {
                        node: node.id.clone(),
                        direction: dir,
                        port,
                        wires: ws.clone(),
                    }),
                    Some(_) => {}
                }
            }
        }
    }

    if let Some(nodes) = cyclic_nodes(circuit) {
        violations.push(Violation::Cycle { nodes });
    }

    ValidationReport { violations }
}

/// Nodes left over by Kahn's algorithm, i.e. nodes on or downstream of a cycle.
pub(super) fn cyclic_nodes(circuit: &Circuit) -> Option<Vec<NodeId>> {
    let succ = super::order::successor_map(circuit);
    let mut indegree: BTreeMap<&NodeId, usize> = circuit.nodes().map(|n| (&n.id, 0)).collect();
    for targets in succ.values() {
        for t in targets {
            if let Some(d) = indegree.get_mut(t) {
                *d += 1;
            }
        }
    }
    let mut ready: Vec<&NodeId> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
    let mut seen: BTreeSet<&NodeId> = BTreeSet::new();
    while let Some(n) = ready.pop() {
        seen.insert(n);
        if let Some(targets) = succ.get(n) {
            for t in targets {
                if let Some(d) = indegree.get_mut(t) {
                    *d -= 1;
                    if *d == 0 {
                        ready.push(t);
                    }
                }
            }
        }
    }
    let rest: Vec<NodeId> = circuit.nodes().map(|n| &n.id).filter(|n| !seen.contains(n)).cloned().collect();
    if rest.is_empty() {
        None
    } else {
        Some(rest)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::chain;
    use super::super::{CircuitBuilder, PortRef, TestNode};
    use super::*;

    #[test]
    fn minimal_chain_is_valid() {
        let report = validate(&chain());
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn two_node_loop_is_a_cycle() {
        let c = CircuitBuilder::new()
            .system("A", "2")
            .unwrap()
            .node(TestNode::new("A1", &["A"], &["A"], 1, "id"))
            .node(TestNode::new("B1", &["A"], &["A"], 1, "id"))
            .wire("A", ("A1", 0), ("B1", 0))
            .wire("A", ("B1", 0), ("A1", 0))
            .build()
            .unwrap();
        let report = validate(&c);
        assert!(report.contains("cycle"), "{report}");
        assert!(matches!(report.violations.last(), Some(Violation::Cycle { nodes }) if nodes.len() == 2));
    }

    #[test]
    fn unwired_output_in_closed_circuit_is_dangling() {
        let c = CircuitBuilder::new()
            .system("A", "2")
            .unwrap()
            .node(TestNode::new("P", &[], &["A", "A"], 1, "rho"))
            .node(TestNode::new("O", &["A"], &[], 2, "z"))
            .wire("A", ("P", 0), ("O", 0))
            .build()
            .unwrap();
        let report = validate(&c);
        assert!(report.contains("dangling port"), "{report}");
        assert_eq!(
            report.violations,
            alloc::vec![Violation::DanglingPort { node: "P".into(), direction: PortDirection::Output, port: 1 }]
        );
    }

    #[test]
    fn reports_every_kind_of_violation() {
        let c = CircuitBuilder::new()
            .system("A", "2")
            .unwrap()
            .node(TestNode::new("P", &[], &["A"], 0, "rho"))
            .node(TestNode::new("O", &["Z"], &[], 1, "z"))
            .wire("A", ("P", 0), ("O", 0))
            .wire("A", ("P", 0), ("O", 3))
            .wire("A", ("Q", 0), ("O", 0))
            .wire_between("A", Endpoint::Port(PortRef::new("P", 0)), Endpoint::Boundary)
            .wire_between("B", Endpoint::Boundary, Endpoint::Boundary)
            .build()
            .unwrap();
        let report = validate(&c);
        for needle in [
            "empty outcome space",
            "unknown system",
            "system mismatch",
            "port out of range",
            "unknown node",
            "boundary wire in closed circuit",
            "detached wire",
            "double-attached port",
        ] {
            assert!(report.contains(needle), "missing {needle}: {report}");
        }
    }

    #[test]
    fn boundary_wires_allowed_when_open() {
        let c = CircuitBuilder::new()
            .open()
            .system("A", "2")
            .unwrap()
            .node(TestNode::new("T", &["A"], &["A"], 1, "id"))
            .wire_between("A", Endpoint::Boundary, Endpoint::Port(PortRef::new("T", 0)))
            .wire_between("A", Endpoint::Port(PortRef::new("T", 0)), Endpoint::Boundary)
            .build()
            .unwrap();
        assert!(validate(&c).is_valid());
    }
}
