//! Circuit contraction and causality checks.
//!
//! A [`Backend`] turns the payload of every node into a test and evaluates
//! a closed circuit into a [`JointDistribution`]. The quantum and classical
//! backends contract the circuit in topological order; the
//! [`TableBackend`] looks probabilities up in explicit tables and serves as
//! a negative control for the checks, since it can encode signaling.

mod backends;
mod checks;
mod contract;
mod distribution;
mod falsify;
mod table;
mod uniqueness;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::circuit::{topological_order, validate, Circuit, CircuitError, NodeId, TestNode, WireId};
use crate::classical::ClassicalError;
use crate::quantum::QuantumError;

pub use backends::{ClassicalBackend, QuantumBackend};
pub use checks::{
    check_marginal_invariance, check_no_signaling_from_future, CausalityReport, CheckKind, NoSignalingPlan, SwapJob,
    SwapResult, Verdict,
};
pub use distribution::{Axis, JointDistribution};
pub use falsify::{falsification_experiment, FalsificationReport};
pub use table::{Table, TableBackend, TableEffectSpace};
pub use uniqueness::{
    check_deterministic_effect_uniqueness, quantum_spanning_states, solve_deterministic_effect, EffectSolution,
    EffectSpace,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error("circuit is not closed")]
    NotClosed,
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("unknown wire {0}")]
    UnknownWire(WireId),
    #[error("unknown system {0}")]
    UnknownSystem(String),
    #[error("system {system} has descriptor {descriptor:?}, expected a positive dimension")]
    BadDimension { system: String, descriptor: String },
    #[error("node {node}: payload {payload:?} does not resolve")]
    UnresolvedPayload { node: NodeId, payload: String },
    #[error("node {node}: {detail}")]
    PortMismatch { node: NodeId, detail: String },
    #[error("node {node} declares {declared} outcomes but its test has {found}")]
    OutcomeMismatch { node: NodeId, declared: usize, found: usize },
    #[error("composite dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("probability {0} outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange(f64),
    #[error("table has {found} entries, expected {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("node {0} appears twice among the axes")]
    DuplicateAxis(NodeId),
    #[error("swap node {swap} lies in the past cone of {target} or is the target itself")]
    InPastCone { swap: NodeId, target: NodeId },
    #[error("alternative {label:?} at node {node} is not a complete test")]
    IncompleteTest { node: NodeId, label: String },
    #[error("no table matches the choices {0}")]
    NoMatchingTable(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("no effect space for system {0}")]
    NoEffectSpace(String),
    #[error("precondition violated: Tr[A_0(rho)] = {0} exceeds tolerance")]
    Precondition(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A labelled candidate test for a node.
#[derive(Debug, Clone, PartialEq)]
pub struct Alternative<T> {
    pub label: String,
    pub test: T,
}

impl<T> Alternative<T> {
    pub fn new(label: impl Into<String>, test: T) -> Self {
        Alternative { label: label.into(), test }
    }
}

pub trait Backend {
    type Test: Clone;

    fn name(&self) -> &'static str;

    /// The test registered under a payload key.
    fn lookup(&self, key: &str) -> Option<Self::Test>;

    /// Number of outcomes `test` has when placed at `node`.
    fn outcome_count(&self, circuit: &Circuit, node: &TestNode, test: &Self::Test) -> Result<usize, EngineError>;

    /// Reject a test whose type does not fit the node's ports.
    fn check_ports(&self, circuit: &Circuit, node: &TestNode, test: &Self::Test) -> Result<(), EngineError>;

    /// Whether the coarse-graining of the test is deterministic.
    fn is_complete(&self, test: &Self::Test) -> bool;

    /// Joint distribution of a valid closed circuit with one test per node.
    fn evaluate(
        &self,
        circuit: &Circuit,
        tests: &BTreeMap<NodeId, Self::Test>,
    ) -> Result<JointDistribution, EngineError>;

    /// Alternative complete tests for `node`, fully determined by `seed`.
    fn alternatives(
        &self,
        circuit: &Circuit,
        node: &TestNode,
        seed: u64,
    ) -> Result<Vec<Alternative<Self::Test>>, EngineError>;
}

/// Parse a system descriptor such as `2` or `dim=2` as a dimension.
pub fn parse_dimension(descriptor: &str) -> Option<usize> {
    let d = descriptor.trim();
    let d = d.strip_prefix("dim=").unwrap_or(d);
    d.trim().parse::<usize>().ok().filter(|&n| n > 0)
}

/// Dimension of a system label registered in `circuit`.
pub fn system_dimension(circuit: &Circuit, system: &str) -> Result<usize, EngineError> {
    let ty = circuit.systems().get(system).ok_or_else(|| EngineError::UnknownSystem(system.into()))?;
    parse_dimension(&ty.descriptor)
        .ok_or_else(|| EngineError::BadDimension { system: system.into(), descriptor: ty.descriptor.clone() })
}

/// Product of the dimensions of the node's input and output ports.
pub fn port_dimensions(circuit: &Circuit, node: &TestNode) -> Result<(usize, usize), EngineError> {
    let prod = |ports: &[String]| -> Result<usize, EngineError> {
        ports.iter().try_fold(1usize, |acc, s| Ok(acc * system_dimension(circuit, s)?))
    };
    Ok((prod(&node.inputs)?, prod(&node.outputs)?))
}

/// Seed for the alternatives of one node, mixing in its position.
pub(crate) fn node_seed(circuit: &Circuit, node: &NodeId, seed: u64) -> u64 {
    let index = circuit.nodes().position(|n| &n.id == node).unwrap_or(0) as u64;
    seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Fail unless the circuit is closed and passes validation.
pub fn ensure_closed_and_valid(circuit: &Circuit) -> Result<(), EngineError> {
    if !circuit.is_closed() {
        return Err(EngineError::NotClosed);
    }
    let report = validate(circuit);
    if !report.is_valid() {
        return Err(CircuitError::Invalid(report).into());
    }
    Ok(())
}

/// Resolve the test of every node, replacing the ones in `overrides`.
pub fn resolve_tests<B: Backend + ?Sized>(
    circuit: &Circuit,
    backend: &B,
    overrides: &BTreeMap<NodeId, B::Test>,
) -> Result<BTreeMap<NodeId, B::Test>, EngineError> {
    for id in overrides.keys() {
        if !circuit.contains_node(id.as_str()) {
            return Err(EngineError::UnknownNode(id.as_str().into()));
        }
    }
    let mut tests = BTreeMap::new();
    for node in circuit.nodes() {
        let test = match overrides.get(&node.id) {
            Some(t) => t.clone(),
            None => {
                let t = backend.lookup(&node.payload).ok_or_else(|| EngineError::UnresolvedPayload {
                    node: node.id.clone(),
                    payload: node.payload.clone(),
                })?;
                let found = backend.outcome_count(circuit, node, &t)?;
                if found != node.outcomes {
                    return Err(EngineError::OutcomeMismatch { node: node.id.clone(), declared: node.outcomes, found });
                }
                t
            }
        };
        backend.check_ports(circuit, node, &test)?;
        tests.insert(node.id.clone(), test);
    }
    Ok(tests)
}

/// Joint distribution of all outcomes of a valid closed circuit.
pub fn joint_distribution<B: Backend + ?Sized>(
    circuit: &Circuit,
    backend: &B,
) -> Result<JointDistribution, EngineError> {
    joint_distribution_with(circuit, backend, &BTreeMap::new())
}

/// As [`joint_distribution`], with some nodes' tests replaced.
pub fn joint_distribution_with<B: Backend + ?Sized>(
    circuit: &Circuit,
    backend: &B,
    overrides: &BTreeMap<NodeId, B::Test>,
) -> Result<JointDistribution, EngineError> {
    ensure_closed_and_valid(circuit)?;
    let tests = resolve_tests(circuit, backend, overrides)?;
    backend.evaluate(circuit, &tests)
}

/// Contraction steps in topological order and the dimension of every wire.
pub(crate) type StepPlan<'a, E> = (Vec<contract::Step<'a, E>>, BTreeMap<WireId, usize>);

pub(crate) fn contraction_steps<'a, E>(
    circuit: &Circuit,
    tests: &'a BTreeMap<NodeId, Vec<E>>,
) -> Result<StepPlan<'a, E>, EngineError> {
    let mut dims = BTreeMap::new();
    for w in circuit.wires() {
        dims.insert(w.id, system_dimension(circuit, &w.system)?);
    }
    let ids = |ws: Vec<Option<&crate::circuit::Wire>>, node: &NodeId| -> Result<Vec<WireId>, EngineError> {
        ws.into_iter()
            .map(|w| {
                w.map(|w| w.id)
                    .ok_or_else(|| EngineError::PortMismatch { node: node.clone(), detail: "unwired port".into() })
            })
            .collect()
    };
    let mut steps = Vec::new();
    for id in topological_order(circuit)? {
        let events = tests.get(&id).ok_or_else(|| EngineError::UnknownNode(id.as_str().into()))?;
        steps.push(contract::Step {
            inputs: ids(circuit.input_wires(id.as_str()), &id)?,
            outputs: ids(circuit.output_wires(id.as_str()), &id)?,
            node: id,
            events,
        });
    }
    Ok((steps, dims))
}
