//! Sequential contraction of a closed circuit in topological order.
//!
//! The carrier holds the (unnormalized) state of every wire currently
//! crossing the frontier. Before a node is applied, the frontier is
//! permuted so the node's input wires sit last, in port order; the node's
//! event then acts as `I_rest ⊗ event` and its output wires are appended.
//! Branches for the outcomes of earlier nodes share their prefix work.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DMatrixView, DVector, Dyn};
use num_complex::Complex64;

use super::{Axis, EngineError, JointDistribution};
use crate::circuit::{NodeId, WireId};
use crate::classical::SubstochasticMatrix;
use crate::linalg::{leg_permutation, permute_square, CMatrix};
use crate::quantum::KrausMap;
use crate::tolerance;

pub(crate) trait Carrier: Sized {
    type Event;
    /// An event in the form `apply` consumes, computed once per contraction.
    type Prepared;
    fn unit() -> Self;
    fn prepare(event: &Self::Event) -> Self::Prepared;
    /// Entry `i` of the result is entry `map[i]` of `self`.
    fn permute(&self, map: &[usize]) -> Self;
    /// `I_rest ⊗ event`, the event acting on the least significant legs.
    fn apply(&self, event: &Self::Prepared, rest: usize) -> Self;
    fn mass(&self) -> f64;
    fn is_zero(&self) -> bool;
}

pub(crate) struct Step<'a, E> {
    pub node: NodeId,
    pub inputs: Vec<WireId>,
    pub outputs: Vec<WireId>,
    pub events: &'a [E],
}

struct Planned<P> {
    map: Option<Vec<usize>>,
    rest: usize,
    events: Vec<P>,
}

pub(crate) fn contract<C: Carrier>(
    steps: &[Step<'_, C::Event>],
    wire_dims: &BTreeMap<WireId, usize>,
    cap: usize,
) -> Result<JointDistribution, EngineError> {
    let dim_of = |w: &WireId| wire_dims.get(w).copied().ok_or(EngineError::UnknownWire(*w));
    let mut frontier: Vec<WireId> = Vec::new();
    let mut plan = Vec::with_capacity(steps.len());
    for step in steps {
        let mut order = Vec::with_capacity(frontier.len());
        order.extend((0..frontier.len()).filter(|&i| !step.inputs.contains(&frontier[i])));
        let rest_len = order.len();
        for w in &step.inputs {
            let pos = frontier.iter().position(|f| f == w).ok_or(EngineError::UnknownWire(*w))?;
            order.push(pos);
        }
        let dims = frontier.iter().map(&dim_of).collect::<Result<Vec<_>, _>>()?;
        let identity = order.iter().enumerate().all(|(i, &o)| i == o);
        let map = if identity { None } else { Some(leg_permutation(&dims, &order)) };
        let rest: usize = order[..rest_len].iter().map(|&i| dims[i]).product();
        let mut next: Vec<WireId> = order[..rest_len].iter().map(|&i| frontier[i]).collect();
        next.extend(step.outputs.iter().copied());
        let next_dim = next.iter().map(&dim_of).collect::<Result<Vec<_>, _>>()?.into_iter().product::<usize>();
        if next_dim > cap {
            return Err(EngineError::DimensionCap { dim: next_dim, cap });
        }
        frontier = next;
        plan.push(Planned { map, rest, events: step.events.iter().map(C::prepare).collect::<Vec<_>>() });
    }
    if let Some(w) = frontier.first() {
        return Err(EngineError::UnknownWire(*w));
    }
    let axes = steps.iter().map(|s| Axis { node: s.node.clone(), outcomes: s.events.len() }).collect();
    let mut dist = JointDistribution::zeros(axes);
    descend::<C>(&plan, 0, C::unit(), 0, dist.probabilities_mut());
    for p in dist.probabilities_mut() {
        if !(-tolerance::OPERATOR..=1.0 + tolerance::OPERATOR).contains(p) {
            return Err(EngineError::ProbabilityOutOfRange(*p));
        }
        *p = p.clamp(0.0, 1.0);
    }
    Ok(dist)
}

fn descend<C: Carrier>(plan: &[Planned<C::Prepared>], depth: usize, state: C, prefix: usize, out: &mut [f64]) {
    let Some(step) = plan.get(depth) else {
        out[prefix] = state.mass();
        return;
    };
    let state = match &step.map {
        Some(map) => state.permute(map),
        None => state,
    };
    let n = step.events.len();
    for (j, e) in step.events.iter().enumerate() {
        let next = state.apply(e, step.rest);
        if !next.is_zero() {
            descend(plan, depth + 1, next, prefix * n + j, out);
        }
    }
}

pub(crate) struct QuantumCarrier(pub CMatrix);

/// A quantum event as applied during contraction. An event with a trivial
/// output is kept as its Gram matrix `Σ K†K`, which is all the partial
/// trace over its input needs.
pub(crate) enum QuantumEvent {
    Kraus(Vec<CMatrix>),
    Effect(CMatrix),
}

/// `(I_rest ⊗ K) M` for `M` with `rest · K.ncols()` rows.
fn left_apply(k: &CMatrix, m: &CMatrix, rest: usize) -> CMatrix {
    let (d_out, d_in) = k.shape();
    let cols = m.ncols();
    let w = DMatrixView::<Complex64>::from_slice(m.as_slice(), d_in, rest * cols);
    (k * w).reshape_generic(Dyn(rest * d_out), Dyn(cols))
}

/// `Σ_k (I_rest ⊗ K_k) M (I_rest ⊗ K_k)†` for one-dimensional outputs,
/// given `g = Σ_k K_k† K_k`.
fn trace_out(g: &CMatrix, m: &CMatrix, rest: usize) -> CMatrix {
    let d = g.nrows();
    CMatrix::from_fn(rest, rest, |r, s| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..d {
            for i in 0..d {
                acc += g[(j, i)] * m[(r * d + i, s * d + j)];
            }
        }
        acc
    })
}

impl Carrier for QuantumCarrier {
    type Event = KrausMap;
    type Prepared = QuantumEvent;

    fn unit() -> Self {
        QuantumCarrier(CMatrix::identity(1, 1))
    }

    fn prepare(event: &KrausMap) -> QuantumEvent {
        if event.out_dim() == 1 {
            QuantumEvent::Effect(event.gram())
        } else {
            QuantumEvent::Kraus(event.ops().to_vec())
        }
    }

    fn permute(&self, map: &[usize]) -> Self {
        QuantumCarrier(permute_square(&self.0, map))
    }

    fn apply(&self, event: &QuantumEvent, rest: usize) -> Self {
        match event {
            QuantumEvent::Effect(g) => QuantumCarrier(trace_out(g, &self.0, rest)),
            QuantumEvent::Kraus(ops) => {
                let d = rest * ops[0].nrows();
                let mut acc = CMatrix::zeros(d, d);
                for k in ops {
                    let half = left_apply(k, &self.0, rest);
                    acc += left_apply(k, &half.adjoint(), rest).adjoint();
                }
                QuantumCarrier(acc)
            }
        }
    }

    fn mass(&self) -> f64 {
        self.0.trace().re
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

pub(crate) struct ClassicalCarrier(pub DVector<f64>);

impl Carrier for ClassicalCarrier {
    type Event = SubstochasticMatrix;
    type Prepared = DMatrix<f64>;

    fn unit() -> Self {
        ClassicalCarrier(DVector::from_element(1, 1.0))
    }

    fn prepare(event: &SubstochasticMatrix) -> DMatrix<f64> {
        event.matrix().clone()
    }

    fn permute(&self, map: &[usize]) -> Self {
        ClassicalCarrier(DVector::from_iterator(map.len(), map.iter().map(|&o| self.0[o])))
    }

    fn apply(&self, event: &DMatrix<f64>, rest: usize) -> Self {
        let w = DMatrixView::<f64>::from_slice(self.0.as_slice(), event.ncols(), rest);
        let x = event * w;
        ClassicalCarrier(DVector::from_column_slice(x.as_slice()))
    }

    fn mass(&self) -> f64 {
        self.0.sum()
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }
}
