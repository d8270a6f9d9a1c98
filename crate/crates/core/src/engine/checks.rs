//! Marginal-invariance and no-signaling checks.
//!
//! Both checks swap the test at some node outside the past cone of a target
//! node, recompute the joint distribution and compare the target's marginal
//! across choices. The deviation is the largest absolute difference of a
//! single marginal probability over all pairs of choices.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{
    ensure_closed_and_valid, joint_distribution_with, resolve_tests, Alternative, Backend, EngineError,
    JointDistribution,
};
use crate::circuit::{past_cone, Circuit, NodeId};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    MarginalInvariance,
    Uniqueness,
    NoSignaling,
    Falsification,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::MarginalInvariance => "marginal-invariance",
            CheckKind::Uniqueness => "uniqueness",
            CheckKind::NoSignaling => "no-signaling",
            CheckKind::Falsification => "falsification",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a causality check. The verdict is `Pass` exactly when
/// `max_deviation ≤ tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalityReport {
    pub kind: CheckKind,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub witness: String,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl CausalityReport {
    pub fn new(
        kind: CheckKind,
        tolerance: f64,
        max_deviation: f64,
        witness: impl Into<String>,
        notes: Vec<String>,
    ) -> Self {
        let verdict = if max_deviation <= tolerance { Verdict::Pass } else { Verdict::Fail };
        CausalityReport { kind, tolerance, max_deviation, witness: witness.into(), verdict, notes }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// The same report judged at another tolerance.
    pub fn with_tolerance(self, tolerance: f64) -> Self {
        CausalityReport::new(self.kind, tolerance, self.max_deviation, self.witness, self.notes)
    }
}

struct Worst {
    deviation: f64,
    witness: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Worst { deviation: 0.0, witness: None }
    }

    /// Compare every pair of labelled marginals; only a strictly larger
    /// deviation replaces the current witness, so the first maximum in
    /// iteration order wins.
    fn absorb(&mut self, swap: &NodeId, target: &NodeId, marginals: &[(&str, &[f64])]) {
        for i in 0..marginals.len() {
            for j in i + 1..marginals.len() {
                let (li, pi) = marginals[i];
                let (lj, pj) = marginals[j];
                for (k, (a, b)) in pi.iter().zip(pj).enumerate() {
                    let d = (a - b).abs();
                    if d > self.deviation || self.witness.is_none() {
                        self.deviation = d;
                        self.witness =
                            Some(format!("target {target} outcome {k}: {swap}={li} gives {a}, {swap}={lj} gives {b}"));
                    }
                }
            }
        }
    }
}

fn check_swap_position(circuit: &Circuit, target: &str, swap: &str) -> Result<(NodeId, NodeId), EngineError> {
    let t = circuit.node(target).ok_or_else(|| EngineError::UnknownNode(target.into()))?.id.clone();
    let s = circuit.node(swap).ok_or_else(|| EngineError::UnknownNode(swap.into()))?.id.clone();
    if s == t || past_cone(circuit, target)?.contains(&s) {
        return Err(EngineError::InPastCone { swap: s, target: t });
    }
    Ok((t, s))
}

/// Compare the marginal of `target` across complete alternatives placed at
/// `swap`, which must lie outside the past cone of `target`.
pub fn check_marginal_invariance<B: Backend + ?Sized>(
    circuit: &Circuit,
    backend: &B,
    target: &str,
    swap: &str,
    alternatives: &[Alternative<B::Test>],
) -> Result<CausalityReport, EngineError> {
    ensure_closed_and_valid(circuit)?;
    let (t, s) = check_swap_position(circuit, target, swap)?;
    let node = circuit.node(swap).expect("checked above");
    let mut marginals = Vec::with_capacity(alternatives.len());
    for alt in alternatives {
        backend.check_ports(circuit, node, &alt.test)?;
        if !backend.is_complete(&alt.test) {
            return Err(EngineError::IncompleteTest { node: s.clone(), label: alt.label.clone() });
        }
        let overrides = [(s.clone(), alt.test.clone())].into_iter().collect();
        marginals.push(joint_distribution_with(circuit, backend, &overrides)?.marginal_of(target)?);
    }
    let labelled: Vec<(&str, &[f64])> =
        alternatives.iter().zip(&marginals).map(|(a, m)| (a.label.as_str(), m.as_slice())).collect();
    let mut worst = Worst::new();
    worst.absorb(&s, &t, &labelled);
    let mut notes = Vec::new();
    if alternatives.len() < 2 {
        notes.push(format!("only {} alternative(s) at {s}; nothing to compare", alternatives.len()));
    }
    Ok(CausalityReport::new(
        CheckKind::MarginalInvariance,
        tolerance::MARGINAL,
        worst.deviation,
        worst.witness.unwrap_or_else(|| "none".to_string()),
        notes,
    ))
}

/// One evaluation of a no-signaling sweep: `test` placed at `swap`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapJob<T> {
    pub swap: NodeId,
    pub label: String,
    pub test: T,
}

/// The joint distribution computed for one [`SwapJob`].
#[derive(Debug, Clone, PartialEq)]
pub struct SwapResult {
    pub swap: NodeId,
    pub label: String,
    pub joint: JointDistribution,
}

/// The evaluations needed to check no-signaling from the future for a set
/// of targets. Each alternative at each swap node is evaluated once and its
/// joint distribution serves every target that node does not precede.
/// Jobs are independent, so callers may run them in any order or in
/// parallel and hand the results back to [`NoSignalingPlan::merge`] in job
/// order.
#[derive(Debug, Clone)]
pub struct NoSignalingPlan<T> {
    targets: Vec<NodeId>,
    swaps: BTreeMap<NodeId, BTreeSet<NodeId>>,
    jobs: Vec<SwapJob<T>>,
    notes: Vec<String>,
}

impl<T: Clone> NoSignalingPlan<T> {
    pub fn new<B: Backend<Test = T> + ?Sized>(
        circuit: &Circuit,
        backend: &B,
        targets: &[&str],
        seed: u64,
    ) -> Result<Self, EngineError> {
        ensure_closed_and_valid(circuit)?;
        let defaults = resolve_tests(circuit, backend, &BTreeMap::new())?;
        let mut swaps = BTreeMap::new();
        let mut all_swaps = BTreeSet::new();
        let mut ids = Vec::with_capacity(targets.len());
        for &target in targets {
            let t = circuit.node(target).ok_or_else(|| EngineError::UnknownNode(target.into()))?.id.clone();
            let past = past_cone(circuit, target)?;
            let set: BTreeSet<NodeId> =
                circuit.nodes().map(|n| n.id.clone()).filter(|n| *n != t && !past.contains(n)).collect();
            all_swaps.extend(set.iter().cloned());
            swaps.insert(t.clone(), set);
            ids.push(t);
        }
        let mut jobs = Vec::new();
        let mut notes = Vec::new();
        for s in &all_swaps {
            let node = circuit.node(s.as_str()).expect("node of the circuit");
            jobs.push(SwapJob { swap: s.clone(), label: "default".into(), test: defaults[s].clone() });
            let alternatives = backend.alternatives(circuit, node, seed)?;
            if alternatives.is_empty() {
                notes.push(format!("node {s}: no alternative tests available"));
            }
            for alt in alternatives {
                backend.check_ports(circuit, node, &alt.test)?;
                if !backend.is_complete(&alt.test) {
                    return Err(EngineError::IncompleteTest { node: s.clone(), label: alt.label });
                }
                jobs.push(SwapJob { swap: s.clone(), label: alt.label, test: alt.test });
            }
        }
        Ok(NoSignalingPlan { targets: ids, swaps, jobs, notes })
    }

    pub fn jobs(&self) -> &[SwapJob<T>] {
        &self.jobs
    }

    pub fn targets(&self) -> &[NodeId] {
        &self.targets
    }

    pub fn run<B: Backend<Test = T> + ?Sized>(
        circuit: &Circuit,
        backend: &B,
        job: &SwapJob<T>,
    ) -> Result<SwapResult, EngineError> {
        let overrides = [(job.swap.clone(), job.test.clone())].into_iter().collect();
        Ok(SwapResult {
            swap: job.swap.clone(),
            label: job.label.clone(),
            joint: joint_distribution_with(circuit, backend, &overrides)?,
        })
    }

    /// One report per target, in target order.
    pub fn merge(&self, results: &[SwapResult]) -> Result<Vec<CausalityReport>, EngineError> {
        if results.len() != self.jobs.len() {
            return Err(EngineError::InvalidArgument(format!(
                "{} results for {} jobs",
                results.len(),
                self.jobs.len()
            )));
        }
        let mut reports = Vec::with_capacity(self.targets.len());
        for t in &self.targets {
            let mut worst = Worst::new();
            let mut notes = self.notes.clone();
            for s in &self.swaps[t] {
                let mut labelled = Vec::new();
                for r in results.iter().filter(|r| &r.swap == s) {
                    labelled.push((r.label.as_str(), r.joint.marginal_of(t.as_str())?));
                }
                let view: Vec<(&str, &[f64])> = labelled.iter().map(|(l, m)| (*l, m.as_slice())).collect();
                worst.absorb(s, t, &view);
            }
            if self.swaps[t].is_empty() {
                notes.push(format!("target {t}: every other node lies in its past cone"));
            }
            reports.push(CausalityReport::new(
                CheckKind::NoSignaling,
                tolerance::MARGINAL,
                worst.deviation,
                worst.witness.unwrap_or_else(|| "none".to_string()),
                notes,
            ));
        }
        Ok(reports)
    }

    /// Run every job sequentially and merge.
    pub fn run_all<B: Backend<Test = T> + ?Sized>(
        &self,
        circuit: &Circuit,
        backend: &B,
    ) -> Result<Vec<CausalityReport>, EngineError> {
        let results = self.jobs.iter().map(|j| Self::run(circuit, backend, j)).collect::<Result<Vec<_>, _>>()?;
        self.merge(&results)
    }
}

/// Swap every node outside the past cone of `target` through its default
/// test and the backend's alternatives, reporting the worst change of the
/// target's marginal.
pub fn check_no_signaling_from_future<B: Backend + ?Sized>(
    circuit: &Circuit,
    backend: &B,
    target: &str,
    seed: u64,
) -> Result<CausalityReport, EngineError> {
    let plan = NoSignalingPlan::new(circuit, backend, &[target], seed)?;
    Ok(plan.run_all(circuit, backend)?.remove(0))
}
