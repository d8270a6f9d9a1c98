//! Quantum and classical backends: payload registries plus contraction.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::contract::{contract, ClassicalCarrier, QuantumCarrier};
use super::{contraction_steps, node_seed, port_dimensions, Alternative, Backend, EngineError, JointDistribution};
use crate::circuit::{Circuit, NodeId, TestNode};
use crate::classical::{self, SubstochasticMatrix};
use crate::quantum::{self, library, KrausMap};
use crate::tolerance;

/// Quantum theory: every test is a list of Kraus maps, one per outcome.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuantumBackend {
    payloads: BTreeMap<String, Vec<KrausMap>>,
    cap: Option<usize>,
}

impl QuantumBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, test: Vec<KrausMap>) {
        self.payloads.insert(key.into(), test);
    }

    pub fn with(mut self, key: impl Into<String>, test: Vec<KrausMap>) -> Self {
        self.insert(key, test);
        self
    }

    pub fn get(&self, key: &str) -> Option<&[KrausMap]> {
        self.payloads.get(key).map(Vec::as_slice)
    }

    pub fn payloads(&self) -> &BTreeMap<String, Vec<KrausMap>> {
        &self.payloads
    }

    /// Lower the composite-dimension cap below the default.
    pub fn with_dimension_cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap.min(tolerance::MAX_COMPOSITE_DIM));
        self
    }

    fn cap(&self) -> usize {
        self.cap.unwrap_or(tolerance::MAX_COMPOSITE_DIM)
    }
}

fn mismatch(node: &TestNode, detail: String) -> EngineError {
    EngineError::PortMismatch { node: node.id.clone(), detail }
}

impl Backend for QuantumBackend {
    type Test = Vec<KrausMap>;

    fn name(&self) -> &'static str {
        "quantum"
    }

    fn lookup(&self, key: &str) -> Option<Vec<KrausMap>> {
        self.payloads.get(key).cloned()
    }

    fn outcome_count(&self, _: &Circuit, _: &TestNode, test: &Vec<KrausMap>) -> Result<usize, EngineError> {
        Ok(test.len())
    }

    fn check_ports(&self, circuit: &Circuit, node: &TestNode, test: &Vec<KrausMap>) -> Result<(), EngineError> {
        if test.is_empty() {
            return Err(mismatch(node, "test has no events".into()));
        }
        let (d_in, d_out) = port_dimensions(circuit, node)?;
        for (j, e) in test.iter().enumerate() {
            if (e.in_dim(), e.out_dim()) != (d_in, d_out) {
                return Err(mismatch(
                    node,
                    format!("event {j} maps {} -> {}, ports need {d_in} -> {d_out}", e.in_dim(), e.out_dim()),
                ));
            }
        }
        Ok(())
    }

    fn is_complete(&self, test: &Vec<KrausMap>) -> bool {
        quantum::coarse_grain(test).is_ok_and(|m| m.is_deterministic())
    }

    fn evaluate(
        &self,
        circuit: &Circuit,
        tests: &BTreeMap<NodeId, Vec<KrausMap>>,
    ) -> Result<JointDistribution, EngineError> {
        let (steps, dims) = contraction_steps(circuit, tests)?;
        contract::<QuantumCarrier>(&steps, &dims, self.cap())
    }

    fn alternatives(
        &self,
        circuit: &Circuit,
        node: &TestNode,
        seed: u64,
    ) -> Result<Vec<Alternative<Vec<KrausMap>>>, EngineError> {
        let (d_in, d_out) = port_dimensions(circuit, node)?;
        Ok(library::standard_library(d_in, d_out, node_seed(circuit, &node.id, seed))
            .into_iter()
            .map(|(label, test)| Alternative::new(label, test))
            .collect())
    }
}

/// Classical theory: every test is a list of substochastic matrices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassicalBackend {
    payloads: BTreeMap<String, Vec<SubstochasticMatrix>>,
}

impl ClassicalBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, test: Vec<SubstochasticMatrix>) {
        self.payloads.insert(key.into(), test);
    }

    pub fn with(mut self, key: impl Into<String>, test: Vec<SubstochasticMatrix>) -> Self {
        self.insert(key, test);
        self
    }

    pub fn get(&self, key: &str) -> Option<&[SubstochasticMatrix]> {
        self.payloads.get(key).map(Vec::as_slice)
    }

    pub fn payloads(&self) -> &BTreeMap<String, Vec<SubstochasticMatrix>> {
        &self.payloads
    }

    /// The same payloads read as diagonal quantum operations.
    pub fn embed(&self) -> QuantumBackend {
        let mut q = QuantumBackend::new();
        for (k, test) in &self.payloads {
            q.insert(k.to_string(), classical::embed_test(test));
        }
        q
    }
}

impl Backend for ClassicalBackend {
    type Test = Vec<SubstochasticMatrix>;

    fn name(&self) -> &'static str {
        "classical"
    }

    fn lookup(&self, key: &str) -> Option<Vec<SubstochasticMatrix>> {
        self.payloads.get(key).cloned()
    }

    fn outcome_count(&self, _: &Circuit, _: &TestNode, test: &Vec<SubstochasticMatrix>) -> Result<usize, EngineError> {
        Ok(test.len())
    }

    fn check_ports(
        &self,
        circuit: &Circuit,
        node: &TestNode,
        test: &Vec<SubstochasticMatrix>,
    ) -> Result<(), EngineError> {
        if test.is_empty() {
            return Err(mismatch(node, "test has no events".into()));
        }
        let (n_in, n_out) = port_dimensions(circuit, node)?;
        for (j, e) in test.iter().enumerate() {
            if (e.in_size(), e.out_size()) != (n_in, n_out) {
                return Err(mismatch(
                    node,
                    format!("event {j} maps {} -> {}, ports need {n_in} -> {n_out}", e.in_size(), e.out_size()),
                ));
            }
        }
        Ok(())
    }

    fn is_complete(&self, test: &Vec<SubstochasticMatrix>) -> bool {
        classical::c_coarse_grain(test).is_ok_and(|m| m.is_deterministic())
    }

    fn evaluate(
        &self,
        circuit: &Circuit,
        tests: &BTreeMap<NodeId, Vec<SubstochasticMatrix>>,
    ) -> Result<JointDistribution, EngineError> {
        let (steps, dims) = contraction_steps(circuit, tests)?;
        contract::<ClassicalCarrier>(&steps, &dims, tolerance::MAX_COMPOSITE_DIM)
    }

    fn alternatives(
        &self,
        circuit: &Circuit,
        node: &TestNode,
        seed: u64,
    ) -> Result<Vec<Alternative<Vec<SubstochasticMatrix>>>, EngineError> {
        let (n_in, n_out) = port_dimensions(circuit, node)?;
        Ok(classical::standard_library(n_in, n_out, node_seed(circuit, &node.id, seed))
            .into_iter()
            .map(|(label, test)| Alternative::new(label, test))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::fixtures::chain;
    use crate::circuit::{CircuitBuilder, TestNode};
    use crate::engine::joint_distribution;
    use crate::linalg::{self, CMatrix};
    use crate::quantum::{QEffect, QState};
    use alloc::vec;
    use nalgebra::DMatrix;

    fn prep_measure(rho: QState) -> (Circuit, QuantumBackend) {
        let c = CircuitBuilder::new()
            .system("A", "2")
            .unwrap()
            .node(TestNode::new("P", &[], &["A"], 1, "rho"))
            .node(TestNode::new("O", &["A"], &[], 2, "z"))
            .wire("A", ("P", 0), ("O", 0))
            .build()
            .unwrap();
        let z: Vec<KrausMap> =
            (0..2).map(|k| KrausMap::from_effect(&QEffect::projector(&linalg::basis_vector(2, k)).unwrap())).collect();
        let b = QuantumBackend::new().with("rho", vec![KrausMap::from_state(&rho)]).with("z", z);
        (c, b)
    }

    #[test]
    fn eigenstate_measurement() {
        let (c, b) = prep_measure(QState::basis(2, 0));
        let d = joint_distribution(&c, &b).unwrap();
        assert_eq!(d.axes().len(), 2);
        assert!((d.get(&[0, 0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(d.get(&[0, 1]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_measurement() {
        let (c, b) = prep_measure(QState::maximally_mixed(2));
        let d = joint_distribution(&c, &b).unwrap();
        assert!((d.get(&[0, 0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((d.get(&[0, 1]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unresolved_payload_and_outcome_mismatch() {
        let (c, b) = prep_measure(QState::basis(2, 0));
        let c2 = c.with_payload("O", "missing").unwrap();
        assert!(matches!(joint_distribution(&c2, &b), Err(EngineError::UnresolvedPayload { .. })));
        let b2 = b.clone().with("z", vec![KrausMap::from_effect(&QEffect::new(linalg::identity(2)).unwrap())]);
        assert!(matches!(joint_distribution(&c, &b2), Err(EngineError::OutcomeMismatch { found: 1, .. })));
    }

    #[test]
    fn port_mismatch_is_rejected() {
        let (c, b) = prep_measure(QState::basis(2, 0));
        let b = b.with("rho", vec![KrausMap::from_state(&QState::basis(3, 0))]);
        assert!(matches!(joint_distribution(&c, &b), Err(EngineError::PortMismatch { .. })));
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let c = CircuitBuilder::new()
            .system("A", "2")
            .unwrap()
            .node(TestNode::new("P", &[], &["A", "A"], 1, "rho"))
            .node(TestNode::new("O", &["A", "A"], &[], 1, "e"))
            .wire("A", ("P", 0), ("O", 0))
            .wire("A", ("P", 1), ("O", 1))
            .build()
            .unwrap();
        let b = QuantumBackend::new()
            .with("rho", vec![KrausMap::from_state(&QState::maximally_mixed(4))])
            .with("e", vec![KrausMap::from_effect(&QEffect::new(linalg::identity(4)).unwrap())])
            .with_dimension_cap(2);
        assert_eq!(joint_distribution(&c, &b), Err(EngineError::DimensionCap { dim: 4, cap: 2 }));
    }

    #[test]
    fn chain_through_a_channel() {
        let c = chain();
        let x = CMatrix::from_row_slice(2, 2, &[linalg::ZERO, linalg::ONE, linalg::ONE, linalg::ZERO]);
        let z: Vec<KrausMap> =
            (0..2).map(|k| KrausMap::from_effect(&QEffect::projector(&linalg::basis_vector(2, k)).unwrap())).collect();
        let b = QuantumBackend::new()
            .with("rho", vec![KrausMap::from_state(&QState::basis(2, 0))])
            .with("id", vec![KrausMap::single(x).unwrap()])
            .with("z", z);
        let d = joint_distribution(&c, &b).unwrap();
        assert_eq!(d.marginal_of("O").unwrap(), [0.0, 1.0]);
    }

    #[test]
    fn classical_matches_embedding_on_chain() {
        let c = chain();
        let flip = SubstochasticMatrix::new(DMatrix::from_row_slice(2, 2, &[0.3, 0.6, 0.7, 0.4])).unwrap();
        let b = ClassicalBackend::new()
            .with("rho", vec![SubstochasticMatrix::new(DMatrix::from_column_slice(2, 1, &[0.2, 0.8])).unwrap()])
            .with("id", vec![flip])
            .with("z", classical::basis_test(2, 1));
        let native = joint_distribution(&c, &b).unwrap();
        let embedded = joint_distribution(&c, &b.embed()).unwrap();
        assert!(native.max_abs_diff(&embedded).unwrap().0 < 1e-15);
        assert!((native.get(&[0, 0, 0]).unwrap() - (0.3 * 0.2 + 0.6 * 0.8)).abs() < 1e-15);
    }
}
