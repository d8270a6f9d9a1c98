//! Joint outcome distributions over the tests of a circuit.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::EngineError;
use crate::circuit::NodeId;
use crate::linalg::leg_permutation;

/// One axis of a joint distribution: a node and the size of its outcome space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub node: NodeId,
    pub outcomes: usize,
}

impl Axis {
    pub fn new(node: impl Into<NodeId>, outcomes: usize) -> Self {
        Axis { node: node.into(), outcomes }
    }
}

/// A table of probabilities indexed by outcome tuples, stored row-major
/// with the first axis most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(axes: Vec<Axis>, probs: Vec<f64>) -> Result<Self, EngineError> {
        let size: usize = axes.iter().map(|a| a.outcomes).product();
        if size != probs.len() {
            return Err(EngineError::ShapeMismatch { expected: size, found: probs.len() });
        }
        let mut seen = BTreeSet::new();
        for a in &axes {
            if !seen.insert(&a.node) {
                return Err(EngineError::DuplicateAxis(a.node.clone()));
            }
        }
        Ok(JointDistribution { axes, probs })
    }

    pub(crate) fn zeros(axes: Vec<Axis>) -> Self {
        let size = axes.iter().map(|a| a.outcomes).product();
        JointDistribution { axes, probs: alloc::vec![0.0; size] }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub(crate) fn probabilities_mut(&mut self) -> &mut [f64] {
        &mut self.probs
    }

    pub fn axis_index(&self, node: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.node.as_str() == node)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Flat index of an outcome tuple, or `None` when out of range.
    pub fn flat_index(&self, outcomes: &[usize]) -> Option<usize> {
        if outcomes.len() != self.axes.len() {
            return None;
        }
        let mut idx = 0;
        for (a, &o) in self.axes.iter().zip(outcomes) {
            if o >= a.outcomes {
                return None;
            }
            idx = idx * a.outcomes + o;
        }
        Some(idx)
    }

    /// Outcome tuple of a flat index.
    pub fn outcome_tuple(&self, mut flat: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = flat % a.outcomes;
            flat /= a.outcomes;
        }
        out
    }

    pub fn get(&self, outcomes: &[usize]) -> Option<f64> {
        self.flat_index(outcomes).map(|i| self.probs[i])
    }

    /// `(outcome tuple, probability)` pairs in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.outcome_tuple(i), p))
    }

    /// Sum over every axis not in `keep`. Kept axes retain their order.
    pub fn marginal<S: AsRef<str>>(&self, keep: &[S]) -> Result<JointDistribution, EngineError> {
        let mut kept = alloc::vec![false; self.axes.len()];
        for k in keep {
            let i = self.axis_index(k.as_ref()).ok_or_else(|| EngineError::UnknownNode(k.as_ref().into()))?;
            kept[i] = true;
        }
        let axes: Vec<Axis> = self.axes.iter().zip(&kept).filter(|(_, &k)| k).map(|(a, _)| a.clone()).collect();
        let mut out = JointDistribution::zeros(axes);
        for (i, &p) in self.probs.iter().enumerate() {
            let tuple = self.outcome_tuple(i);
            let mut j = 0;
            for ((a, &k), o) in self.axes.iter().zip(&kept).zip(tuple) {
                if k {
                    j = j * a.outcomes + o;
                }
            }
            out.probs[j] += p;
        }
        Ok(out)
    }

    /// Single-node marginal as a plain vector.
    pub fn marginal_of(&self, node: &str) -> Result<Vec<f64>, EngineError> {
        Ok(self.marginal(&[node])?.probs)
    }

    /// The same distribution with axes listed in `order`, which must be a
    /// permutation of the current axis nodes.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<JointDistribution, EngineError> {
        if order.len() != self.axes.len() {
            return Err(EngineError::ShapeMismatch { expected: self.axes.len(), found: order.len() });
        }
        let mut positions = Vec::with_capacity(order.len());
        for n in order {
            let i = self.axis_index(n.as_ref()).ok_or_else(|| EngineError::UnknownNode(n.as_ref().into()))?;
            if positions.contains(&i) {
                return Err(EngineError::DuplicateAxis(NodeId::new(n.as_ref())));
            }
            positions.push(i);
        }
        let dims: Vec<usize> = self.axes.iter().map(|a| a.outcomes).collect();
        let map = leg_permutation(&dims, &positions);
        Ok(JointDistribution {
            axes: positions.iter().map(|&i| self.axes[i].clone()).collect(),
            probs: map.into_iter().map(|old| self.probs[old]).collect(),
        })
    }

    /// Largest per-outcome absolute difference to a distribution with the
    /// same axes, together with the first outcome tuple achieving it.
    pub fn max_abs_diff(&self, other: &JointDistribution) -> Option<(f64, Vec<usize>)> {
        if self.axes != other.axes {
            return None;
        }
        let mut best = (0.0, 0);
        for (i, (a, b)) in self.probs.iter().zip(&other.probs).enumerate() {
            let d = (a - b).abs();
            if d > best.0 {
                best = (d, i);
            }
        }
        Some((best.0, self.outcome_tuple(best.1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sample() -> JointDistribution {
        JointDistribution::new(vec![Axis::new("A", 2), Axis::new("B", 3)], vec![0.1, 0.2, 0.0, 0.3, 0.25, 0.15])
            .unwrap()
    }

    #[test]
    fn indexing_is_row_major() {
        let d = sample();
        assert_eq!(d.get(&[1, 0]), Some(0.3));
        assert_eq!(d.flat_index(&[0, 2]), Some(2));
        assert_eq!(d.outcome_tuple(4), [1, 1]);
        assert_eq!(d.get(&[2, 0]), None);
    }

    #[test]
    fn marginals() {
        let d = sample();
        let a = d.marginal_of("A").unwrap();
        assert!((a[0] - 0.3).abs() < 1e-15 && (a[1] - 0.7).abs() < 1e-15);
        let none = d.marginal::<&str>(&[]).unwrap();
        assert_eq!(none.probabilities().len(), 1);
        assert!((none.total() - d.total()).abs() < 1e-15);
        assert_eq!(d.marginal(&["B", "A"]).unwrap(), d);
        assert!(matches!(d.marginal(&["C"]), Err(EngineError::UnknownNode(_))));
    }

    #[test]
    fn reorder_transposes() {
        let d = sample();
        let r = d.reorder(&["B", "A"]).unwrap();
        assert_eq!(r.axes()[0].node.as_str(), "B");
        assert_eq!(r.get(&[2, 1]), d.get(&[1, 2]));
        assert_eq!(r.reorder(&["A", "B"]).unwrap(), d);
    }

    #[test]
    fn construction_errors() {
        assert!(JointDistribution::new(vec![Axis::new("A", 2)], vec![1.0]).is_err());
        assert!(JointDistribution::new(vec![Axis::new("A", 1), Axis::new("A", 1)], vec![1.0]).is_err());
    }
}
