//! The two-test cascade that would falsify causality.
//!
//! A state is fed into a two-outcome test `A` whose outcome 0 cannot occur
//! on that state, followed by an observation `B`. If swapping `B` for
//! another observation `B'` could make outcome 0 of `A` occur, later
//! choices would influence earlier statistics. The reverse influence, of
//! `A` on the statistics of `B`, is allowed and reported alongside.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{joint_distribution, CausalityReport, CheckKind, EngineError, QuantumBackend};
use crate::circuit::{Circuit, CircuitBuilder, TestNode};
use crate::quantum::{self, KrausMap, QState};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct FalsificationReport {
    pub report: CausalityReport,
    /// `p_A(0)` with `B` and with `B'`.
    pub p_a_zero: [f64; 2],
    /// `p_B` under `A` and under the alternative `A` test.
    pub p_b: [Vec<f64>; 2],
    /// `p_B'` under `A` and under the alternative `A` test.
    pub p_b_alt: [Vec<f64>; 2],
    /// Largest change of an outcome probability of `B` or `B'` when `A`
    /// is replaced by the alternative.
    pub forward_dependence: f64,
    pub forward_witness: String,
}

fn cascade(rho: &QState, a: &[KrausMap], b: &[KrausMap]) -> Result<(Circuit, QuantumBackend), EngineError> {
    let d_in = rho.dim();
    let d_mid = a.first().map_or(d_in, KrausMap::out_dim);
    let c = CircuitBuilder::new()
        .system("S", &d_in.to_string())?
        .system("M", &d_mid.to_string())?
        .node(TestNode::new("P", &[], &["S"], 1, "prep"))
        .node(TestNode::new("A", &["S"], &["M"], a.len(), "a"))
        .node(TestNode::new("B", &["M"], &[], b.len(), "b"))
        .wire("S", ("P", 0), ("A", 0))
        .wire("M", ("A", 0), ("B", 0))
        .build()?;
    let backend = QuantumBackend::new()
        .with("prep", alloc::vec![KrausMap::from_state(rho)])
        .with("a", a.to_vec())
        .with("b", b.to_vec());
    Ok((c, backend))
}

fn require_complete(name: &str, test: &[KrausMap]) -> Result<(), EngineError> {
    let complete = quantum::coarse_grain(test).is_ok_and(|m| m.is_deterministic());
    if complete {
        Ok(())
    } else {
        Err(EngineError::InvalidArgument(format!("test {name} is not complete")))
    }
}

fn marginals(rho: &QState, a: &[KrausMap], b: &[KrausMap]) -> Result<(Vec<f64>, Vec<f64>), EngineError> {
    let (c, backend) = cascade(rho, a, b)?;
    let joint = joint_distribution(&c, &backend)?;
    Ok((joint.marginal_of("A")?, joint.marginal_of("B")?))
}

/// Run the cascade `ρ → A → B` and `ρ → A → B'`. The verdict passes when
/// outcome 0 of `A` stays impossible under both observations. The
/// statistics of `B` and `B'` are also computed with `a_alt` in place of
/// `A` (the identity channel when `None`) to exhibit forward dependence.
pub fn falsification_experiment(
    rho: &QState,
    a: &[KrausMap],
    b: &[KrausMap],
    b_alt: &[KrausMap],
    a_alt: Option<&[KrausMap]>,
) -> Result<FalsificationReport, EngineError> {
    if a.len() != 2 {
        return Err(EngineError::InvalidArgument(format!("test A needs outcomes {{0, 1}}, found {}", a.len())));
    }
    let identity = [KrausMap::identity(rho.dim())];
    let a_alt = a_alt.unwrap_or(&identity);
    for (name, t) in [("A", a), ("B", b), ("B'", b_alt), ("alternative A", a_alt)] {
        require_complete(name, t)?;
    }
    let p0 = quantum::apply(&a[0], rho)?.trace();
    if p0 > tolerance::FALSIFICATION {
        return Err(EngineError::Precondition(p0));
    }
    let (pa_b, pb_a) = marginals(rho, a, b)?;
    let (pa_b_alt, pb_alt_a) = marginals(rho, a, b_alt)?;
    let (_, pb_a_alt) = marginals(rho, a_alt, b)?;
    let (_, pb_alt_a_alt) = marginals(rho, a_alt, b_alt)?;

    let p_a_zero = [pa_b[0], pa_b_alt[0]];
    let (deviation, witness) = if p_a_zero[1] > p_a_zero[0] {
        (p_a_zero[1], format!("p_A(0) = {} under B'", p_a_zero[1]))
    } else {
        (p_a_zero[0], format!("p_A(0) = {} under B", p_a_zero[0]))
    };

    let mut forward = (0.0, String::from("none"));
    for (name, under_a, under_alt) in [("B", &pb_a, &pb_a_alt), ("B'", &pb_alt_a, &pb_alt_a_alt)] {
        for (j, (x, y)) in under_a.iter().zip(under_alt.iter()).enumerate() {
            if (x - y).abs() > forward.0 {
                forward = ((x - y).abs(), format!("{name} outcome {j}: {x} after A, {y} after the alternative A"));
            }
        }
    }
    let notes = alloc::vec![
        format!("p_B after A: {:?}", pb_a),
        format!("p_B' after A: {:?}", pb_alt_a),
        format!("p_B after alternative A: {:?}", pb_a_alt),
        format!("p_B' after alternative A: {:?}", pb_alt_a_alt),
        format!("forward dependence {} ({})", forward.0, forward.1),
    ];
    let report = CausalityReport::new(CheckKind::Falsification, tolerance::FALSIFICATION, deviation, witness, notes);
    Ok(FalsificationReport {
        report,
        p_a_zero,
        p_b: [pb_a, pb_a_alt],
        p_b_alt: [pb_alt_a, pb_alt_a_alt],
        forward_dependence: forward.0,
        forward_witness: forward.1,
    })
}
