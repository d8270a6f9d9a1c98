//! Explicit probability tables indexed by the choice of test at each node.
//!
//! Nothing forces the tables to come from a causal theory, so a table can
//! make a preparation's statistics depend on a later observation choice.
//! That makes this backend the negative control for the causality checks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::uniqueness::EffectSpace;
use super::{Alternative, Backend, EngineError, JointDistribution};
use crate::circuit::{topological_order, Circuit, NodeId, SystemType, TestNode};
use crate::tolerance;

/// One joint distribution, used whenever every listed node carries the
/// listed test label. Nodes without an entry in `choices` match any label.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub choices: BTreeMap<NodeId, String>,
    pub distribution: JointDistribution,
}

/// States and effects of one system as explicit real vectors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TableEffectSpace {
    pub states: Vec<Vec<f64>>,
    pub effects: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TableBackend {
    tables: Vec<Table>,
    effect_spaces: BTreeMap<String, TableEffectSpace>,
}

fn describe(choices: &BTreeMap<NodeId, String>) -> String {
    let parts: Vec<String> = choices.iter().map(|(n, l)| format!("{n}={l}")).collect();
    format!("{{{}}}", parts.join(", "))
}

impl TableBackend {
    /// Every table must be a normalized distribution and no two tables may
    /// share the same choices.
    pub fn new(tables: Vec<Table>) -> Result<Self, EngineError> {
        let mut seen = BTreeSet::new();
        for t in &tables {
            if let Some(p) = t.distribution.probabilities().iter().find(|p| **p < -tolerance::OPERATOR) {
                return Err(EngineError::InvalidTable(format!("{}: negative probability {p}", describe(&t.choices))));
            }
            let total = t.distribution.total();
            if (total - 1.0).abs() > tolerance::MARGINAL {
                return Err(EngineError::InvalidTable(format!("{}: total {total} is not 1", describe(&t.choices))));
            }
            if !seen.insert(&t.choices) {
                return Err(EngineError::InvalidTable(format!("{}: duplicate choices", describe(&t.choices))));
            }
        }
        Ok(TableBackend { tables, effect_spaces: BTreeMap::new() })
    }

    pub fn with_effect_space(
        mut self,
        system: impl Into<String>,
        space: TableEffectSpace,
    ) -> Result<Self, EngineError> {
        let system = system.into();
        let len = space.states.first().or(space.effects.first()).map_or(0, Vec::len);
        if len == 0 || space.states.iter().chain(&space.effects).any(|v| v.len() != len) {
            return Err(EngineError::InvalidTable(format!(
                "effect space of {system}: vectors must share a positive length"
            )));
        }
        self.effect_spaces.insert(system, space);
        Ok(self)
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn effect_spaces(&self) -> &BTreeMap<String, TableEffectSpace> {
        &self.effect_spaces
    }

    fn compatible<'a>(&'a self, node: &'a NodeId, label: &'a str) -> impl Iterator<Item = &'a Table> + 'a {
        self.tables.iter().filter(move |t| t.choices.get(node).is_none_or(|l| l == label))
    }

    fn space(&self, system: &SystemType) -> Result<&TableEffectSpace, EngineError> {
        self.effect_spaces.get(&system.label).ok_or_else(|| EngineError::NoEffectSpace(system.label.clone()))
    }
}

impl Backend for TableBackend {
    type Test = String;

    fn name(&self) -> &'static str {
        "table"
    }

    fn lookup(&self, key: &str) -> Option<String> {
        Some(key.into())
    }

    fn outcome_count(&self, _: &Circuit, node: &TestNode, label: &String) -> Result<usize, EngineError> {
        let table = self
            .compatible(&node.id, label)
            .next()
            .ok_or_else(|| EngineError::UnresolvedPayload { node: node.id.clone(), payload: label.clone() })?;
        let d = &table.distribution;
        d.axis_index(node.id.as_str()).map(|i| d.axes()[i].outcomes).ok_or_else(|| {
            EngineError::InvalidTable(format!("{}: no axis for node {}", describe(&table.choices), node.id))
        })
    }

    fn check_ports(&self, circuit: &Circuit, node: &TestNode, label: &String) -> Result<(), EngineError> {
        self.outcome_count(circuit, node, label).map(|_| ())
    }

    fn is_complete(&self, _: &String) -> bool {
        true
    }

    fn evaluate(&self, circuit: &Circuit, tests: &BTreeMap<NodeId, String>) -> Result<JointDistribution, EngineError> {
        let table = self
            .tables
            .iter()
            .find(|t| t.choices.iter().all(|(n, l)| tests.get(n) == Some(l)))
            .ok_or_else(|| EngineError::NoMatchingTable(describe(tests)))?;
        let order = topological_order(circuit)?;
        let names: Vec<&str> = order.iter().map(NodeId::as_str).collect();
        table.distribution.reorder(&names).map_err(|e| {
            EngineError::InvalidTable(format!("{}: axes do not match the circuit ({e})", describe(&table.choices)))
        })
    }

    fn alternatives(&self, _: &Circuit, node: &TestNode, _: u64) -> Result<Vec<Alternative<String>>, EngineError> {
        let labels: BTreeSet<&String> = self.tables.iter().filter_map(|t| t.choices.get(&node.id)).collect();
        Ok(labels.into_iter().map(|l| Alternative::new(l.clone(), l.clone())).collect())
    }
}

impl EffectSpace for TableBackend {
    fn effect_dimension(&self, system: &SystemType) -> Result<usize, EngineError> {
        let s = self.space(system)?;
        Ok(s.states.first().or(s.effects.first()).map_or(0, Vec::len))
    }

    fn spanning_states(&self, system: &SystemType) -> Result<Vec<Vec<f64>>, EngineError> {
        Ok(self.space(system)?.states.clone())
    }

    /// The first listed effect that is normalizing on every state.
    fn reference_effect(&self, system: &SystemType) -> Result<Vec<f64>, EngineError> {
        let s = self.space(system)?;
        s.effects
            .iter()
            .find(|e| {
                s.states.iter().all(|st| {
                    (st.iter().zip(e.iter()).map(|(a, b)| a * b).sum::<f64>() - 1.0).abs() <= tolerance::OPERATOR
                })
            })
            .cloned()
            .ok_or_else(|| EngineError::NoEffectSpace(format!("{} (no normalizing effect listed)", system.label)))
    }

    fn candidate_effects(&self, system: &SystemType) -> Result<Vec<Vec<f64>>, EngineError> {
        Ok(self.space(system)?.effects.clone())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::engine::{joint_distribution, joint_distribution_with, Axis};
    use alloc::vec;

    pub(crate) fn signaling_pair(signal: f64) -> (Circuit, TableBackend) {
        let c = CircuitBuilder::new()
            .system("A", "2")
            .unwrap()
            .node(TestNode::new("P", &[], &["A"], 2, "p"))
            .node(TestNode::new("O", &["A"], &[], 2, "z"))
            .wire("A", ("P", 0), ("O", 0))
            .build()
            .unwrap();
        let table = |label: &str, p0: f64| Table {
            choices: [(NodeId::new("O"), label.into())].into_iter().collect(),
            distribution: JointDistribution::new(
                vec![Axis::new("P", 2), Axis::new("O", 2)],
                vec![p0, 0.0, 0.0, 1.0 - p0],
            )
            .unwrap(),
        };
        (c, TableBackend::new(vec![table("z", 0.5), table("x", 0.5 + signal)]).unwrap())
    }

    #[test]
    fn lookup_follows_choices() {
        let (c, b) = signaling_pair(0.2);
        let d = joint_distribution(&c, &b).unwrap();
        assert_eq!(d.marginal_of("P").unwrap(), [0.5, 0.5]);
        let over = [(NodeId::new("O"), String::from("x"))].into_iter().collect();
        let d = joint_distribution_with(&c, &b, &over).unwrap();
        assert!((d.marginal_of("P").unwrap()[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn unknown_label_is_unresolved() {
        let (c, b) = signaling_pair(0.2);
        let c = c.with_payload("O", "y").unwrap();
        assert!(matches!(joint_distribution(&c, &b), Err(EngineError::UnresolvedPayload { .. })));
    }

    #[test]
    fn alternatives_are_the_registered_labels() {
        let (c, b) = signaling_pair(0.2);
        let labels: Vec<String> =
            b.alternatives(&c, c.node("O").unwrap(), 0).unwrap().into_iter().map(|a| a.label).collect();
        assert_eq!(labels, ["x", "z"]);
        assert!(b.alternatives(&c, c.node("P").unwrap(), 0).unwrap().is_empty());
    }

    #[test]
    fn unnormalized_or_duplicate_tables_are_rejected() {
        let d = JointDistribution::new(vec![Axis::new("P", 2)], vec![0.5, 0.4]).unwrap();
        let t = Table { choices: BTreeMap::new(), distribution: d };
        assert!(matches!(TableBackend::new(vec![t]), Err(EngineError::InvalidTable(_))));
        let d = JointDistribution::new(vec![Axis::new("P", 1)], vec![1.0]).unwrap();
        let t = Table { choices: BTreeMap::new(), distribution: d };
        assert!(TableBackend::new(vec![t.clone(), t]).is_err());
    }
}
