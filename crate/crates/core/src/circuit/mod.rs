//! Closed circuits as directed acyclic graphs of test nodes.
//!
//! Nodes carry ordered input and output port lists typed by system labels.
//! Wires go from an output port to an input port (or to/from a
//! [`Endpoint::Boundary`] in an open circuit). Circuits are immutable once
//! built; every analysis here is a pure function of the circuit.

mod cut;
mod order;
mod validate;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use cut::{recompose, split_prep_obs, Bipartition};
pub use order::{future_cone, past_cone, precedes, topological_order, CausalOrder};
pub use validate::{validate, PortDirection, ValidationReport, Violation};

/// Label of the trivial system, the unit of parallel composition.
pub const TRIVIAL_SYSTEM: &str = "I";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("duplicate node `{0}`")]
    DuplicateNode(NodeId),
    #[error("duplicate system `{0}`")]
    DuplicateSystem(String),
    #[error("duplicate wire id {0}")]
    DuplicateWire(WireId),
    #[error("unknown wire id {0}")]
    UnknownWire(WireId),
    #[error("cycle detected through nodes {0:?}")]
    Cycle(Vec<NodeId>),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("circuit is not valid: {0}")]
    Invalid(ValidationReport),
}

/// Caller-supplied node identifier. Ordering is lexicographic and is used
/// for every tie-break in this crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl core::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WireId(pub usize);

impl fmt::Display for WireId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

/// A system label together with its backend-specific descriptor, which is
/// opaque at this layer (the quantum and classical backends read it as a
/// dimension).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemType {
    pub label: String,
    pub descriptor: String,
}

/// Registry of the systems a circuit may use. The trivial system `I` is
/// always present, exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemRegistry {
    systems: BTreeMap<String, SystemType>,
}

impl Default for SystemRegistry {
    fn default() -> Self {
        let mut systems = BTreeMap::new();
        systems.insert(
            TRIVIAL_SYSTEM.to_string(),
            SystemType { label: TRIVIAL_SYSTEM.to_string(), descriptor: "1".to_string() },
        );
        SystemRegistry { systems }
    }
}

impl SystemRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: &str, descriptor: &str) -> Result<(), CircuitError> {
        if self.systems.contains_key(label) {
            return Err(CircuitError::DuplicateSystem(label.to_string()));
        }
        self.systems
            .insert(label.to_string(), SystemType { label: label.to_string(), descriptor: descriptor.to_string() });
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&SystemType> {
        self.systems.get(label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.systems.contains_key(label)
    }

    pub fn is_trivial(label: &str) -> bool {
        label == TRIVIAL_SYSTEM
    }

    pub fn iter(&self) -> impl Iterator<Item = &SystemType> {
        self.systems.values()
    }
}

/// A test: a set of alternative events over a finite outcome space. The
/// events themselves are resolved by a backend through `payload`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestNode {
    pub id: NodeId,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub outcomes: usize,
    pub payload: String,
}

impl TestNode {
    pub fn new(id: impl Into<NodeId>, inputs: &[&str], outputs: &[&str], outcomes: usize, payload: &str) -> Self {
        TestNode {
            id: id.into(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            outcomes,
            payload: payload.to_string(),
        }
    }

    /// True when every input port is trivial (vacuously so for no inputs).
    pub fn is_preparation(&self) -> bool {
        self.inputs.iter().all(|s| SystemRegistry::is_trivial(s))
    }

    /// True when every output port is trivial (vacuously so for no outputs).
    pub fn is_observation(&self) -> bool {
        self.outputs.iter().all(|s| SystemRegistry::is_trivial(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortRef {
    pub node: NodeId,
    pub port: usize,
}

impl PortRef {
    pub fn new(node: impl Into<NodeId>, port: usize) -> Self {
        PortRef { node: node.into(), port }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.node, self.port)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Port(PortRef),
    Boundary,
}

impl Endpoint {
    pub fn port(&self) -> Option<&PortRef> {
        match self {
            Endpoint::Port(p) => Some(p),
            Endpoint::Boundary => None,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Port(p) => p.fmt(f),
            Endpoint::Boundary => f.write_str("boundary"),
        }
    }
}

/// A wire carries one system from an output port (`source`) to an input
/// port (`target`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wire {
    pub id: WireId,
    pub system: String,
    pub source: Endpoint,
    pub target: Endpoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    systems: SystemRegistry,
    nodes: BTreeMap<NodeId, TestNode>,
    wires: Vec<Wire>,
    closed: bool,
}

impl Circuit {
    /// Assemble a circuit. Structural problems other than duplicate ids are
    /// not rejected here; they are reported by [`validate`].
    pub fn new(
        systems: SystemRegistry,
        nodes: impl IntoIterator<Item = TestNode>,
        wires: impl IntoIterator<Item = Wire>,
        closed: bool,
    ) -> Result<Self, CircuitError> {
        let mut node_map = BTreeMap::new();
        for node in nodes {
            if node_map.contains_key(&node.id) {
                return Err(CircuitError::DuplicateNode(node.id));
            }
            node_map.insert(node.id.clone(), node);
        }
        let mut wires: Vec<Wire> = wires.into_iter().collect();
        wires.sort_by_key(|w| w.id);
        for pair in wires.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(CircuitError::DuplicateWire(pair[0].id));
            }
        }
        Ok(Circuit { systems, nodes: node_map, wires, closed })
    }

    pub fn systems(&self) -> &SystemRegistry {
        &self.systems
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Nodes in lexicographic id order.
    pub fn nodes(&self) -> impl Iterator<Item = &TestNode> {
        self.nodes.values()
    }

    pub fn node(&self, id: &str) -> Option<&TestNode> {
        self.nodes.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub(crate) fn require_node(&self, id: &str) -> Result<&TestNode, CircuitError> {
        self.nodes.get(id).ok_or_else(|| CircuitError::UnknownNode(NodeId::from(id)))
    }

    /// Wires in increasing id order.
    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn wire(&self, id: WireId) -> Option<&Wire> {
        self.wires.binary_search_by_key(&id, |w| w.id).ok().map(|i| &self.wires[i])
    }

    /// Wire attached to each input port of `node`, in port order. Only
    /// meaningful on a valid circuit (each port then has exactly one wire).
    pub fn input_wires(&self, node: &str) -> Vec<Option<&Wire>> {
        let width = self.nodes.get(node).map_or(0, |n| n.inputs.len());
        self.port_wires(node, width, |w| &w.target)
    }

    /// Wire attached to each output port of `node`, in port order.
    pub fn output_wires(&self, node: &str) -> Vec<Option<&Wire>> {
        let width = self.nodes.get(node).map_or(0, |n| n.outputs.len());
        self.port_wires(node, width, |w| &w.source)
    }

    fn port_wires(&self, node: &str, width: usize, end: impl Fn(&Wire) -> &Endpoint) -> Vec<Option<&Wire>> {
        let mut slots = alloc::vec![None; width];
        for w in &self.wires {
            if let Endpoint::Port(p) = end(w) {
                if p.node.as_str() == node && p.port < width && slots[p.port].is_none() {
                    slots[p.port] = Some(w);
                }
            }
        }
        slots
    }

    /// Open boundary wires that leave the circuit (source attached, target boundary).
    pub fn output_boundary(&self) -> impl Iterator<Item = &Wire> {
        self.wires.iter().filter(|w| w.target == Endpoint::Boundary && w.source != Endpoint::Boundary)
    }

    /// Open boundary wires that enter the circuit.
    pub fn input_boundary(&self) -> impl Iterator<Item = &Wire> {
        self.wires.iter().filter(|w| w.source == Endpoint::Boundary && w.target != Endpoint::Boundary)
    }

    /// A copy of this circuit with the payload of `node` replaced.
    pub fn with_payload(&self, node: &str, payload: &str) -> Result<Circuit, CircuitError> {
        let mut c = self.clone();
        let n = c.nodes.get_mut(node).ok_or_else(|| CircuitError::UnknownNode(NodeId::from(node)))?;
        n.payload = payload.to_string();
        Ok(c)
    }

    pub(crate) fn into_parts(self) -> (SystemRegistry, BTreeMap<NodeId, TestNode>, Vec<Wire>) {
        (self.systems, self.nodes, self.wires)
    }
}

/// Incremental construction of a [`Circuit`]. Wire ids are assigned in
/// insertion order.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    systems: SystemRegistry,
    nodes: Vec<TestNode>,
    wires: Vec<Wire>,
    closed: bool,
}

impl Default for CircuitBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl CircuitBuilder {
    /// A builder for a closed circuit.
    pub fn new() -> Self {
        CircuitBuilder { systems: SystemRegistry::new(), nodes: Vec::new(), wires: Vec::new(), closed: true }
    }

    pub fn open(mut self) -> Self {
        self.closed = false;
        self
    }

    pub fn system(mut self, label: &str, descriptor: &str) -> Result<Self, CircuitError> {
        self.systems.insert(label, descriptor)?;
        Ok(self)
    }

    pub fn node(mut self, node: TestNode) -> Self {
        self.nodes.push(node);
        self
    }

    /// Wire `system` from output port `src.1` of node `src.0` to input port
    /// `dst.1` of node `dst.0`.
    pub fn wire(self, system: &str, src: (&str, usize), dst: (&str, usize)) -> Self {
        self.wire_between(
            system,
            Endpoint::Port(PortRef::new(src.0, src.1)),
            Endpoint::Port(PortRef::new(dst.0, dst.1)),
        )
    }

    pub fn wire_between(mut self, system: &str, source: Endpoint, target: Endpoint) -> Self {
        let id = WireId(self.wires.iter().map(|w| w.id.0 + 1).max().unwrap_or(0));
        self.wires.push(Wire { id, system: system.to_string(), source, target });
        self
    }

    pub fn build(self) -> Result<Circuit, CircuitError> {
        Circuit::new(self.systems, self.nodes, self.wires, self.closed)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// P → T → O on a qubit system `A`.
    pub fn chain() -> Circuit {
        CircuitBuilder::new()
            .system("A", "2")
            .unwrap()
            .node(TestNode::new("P", &[], &["A"], 1, "rho"))
            .node(TestNode::new("T", &["A"], &["A"], 1, "id"))
            .node(TestNode::new("O", &["A"], &[], 2, "z"))
            .wire("A", ("P", 0), ("T", 0))
            .wire("A", ("T", 0), ("O", 0))
            .build()
            .unwrap()
    }

    /// Two disconnected chains P1 → O1 and P2 → O2.
    pub fn two_chains() -> Circuit {
        CircuitBuilder::new()
            .system("A", "2")
            .unwrap()
            .node(TestNode::new("P1", &[], &["A"], 1, "rho"))
            .node(TestNode::new("O1", &["A"], &[], 2, "z"))
            .node(TestNode::new("P2", &[], &["A"], 1, "rho"))
            .node(TestNode::new("O2", &["A"], &[], 2, "z"))
            .wire("A", ("P1", 0), ("O1", 0))
            .wire("A", ("P2", 0), ("O2", 0))
            .build()
            .unwrap()
    }
}
