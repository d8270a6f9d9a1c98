//! Uniqueness of the deterministic effect.
//!
//! An effect `e` is deterministic when it pairs to one with every
//! deterministic state. Given deterministic states that span the state
//! space, the linear system `⟨e, s_k⟩ = 1` has exactly one solution, and
//! for a causal theory that solution is the backend's own deterministic
//! effect (`I` in quantum theory, the all-ones covector classically).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use super::{parse_dimension, CausalityReport, CheckKind, ClassicalBackend, EngineError, QuantumBackend};
use crate::circuit::SystemType;
use crate::linalg::{self, hermitian_to_real, CVector};
use crate::quantum::QState;
use crate::tolerance;

/// A backend that can describe the states and effects of a system as
/// real vectors whose dot product is the probability pairing.
pub trait EffectSpace {
    fn effect_dimension(&self, system: &SystemType) -> Result<usize, EngineError>;

    /// Deterministic states spanning the state space.
    fn spanning_states(&self, system: &SystemType) -> Result<Vec<Vec<f64>>, EngineError>;

    /// The effect the backend itself treats as deterministic.
    fn reference_effect(&self, system: &SystemType) -> Result<Vec<f64>, EngineError>;

    /// Further effects claimed to be deterministic.
    fn candidate_effects(&self, _system: &SystemType) -> Result<Vec<Vec<f64>>, EngineError> {
        Ok(Vec::new())
    }
}

fn dimension_of(system: &SystemType) -> Result<usize, EngineError> {
    parse_dimension(&system.descriptor).ok_or_else(|| EngineError::BadDimension {
        system: system.label.clone(),
        descriptor: system.descriptor.clone(),
    })
}

/// `d²` pure states whose projectors span the Hermitian `d × d` matrices:
/// `|k⟩`, `(|j⟩+|k⟩)/√2` and `(|j⟩+i|k⟩)/√2` for `j < k`.
pub fn quantum_spanning_states(d: usize) -> Vec<QState> {
    let mut out: Vec<QState> = (0..d).map(|k| QState::basis(d, k)).collect();
    let s = core::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in j + 1..d {
            for phase in [linalg::ONE, num_complex::Complex64::new(0.0, 1.0)] {
                let mut v = CVector::zeros(d);
                v[j] = linalg::ONE * s;
                v[k] = phase * s;
                out.push(QState::pure(&v).expect("unit vector"));
            }
        }
    }
    out
}

impl EffectSpace for QuantumBackend {
    fn effect_dimension(&self, system: &SystemType) -> Result<usize, EngineError> {
        let d = dimension_of(system)?;
        Ok(d * d)
    }

    fn spanning_states(&self, system: &SystemType) -> Result<Vec<Vec<f64>>, EngineError> {
        Ok(quantum_spanning_states(dimension_of(system)?).iter().map(|s| hermitian_to_real(s.matrix())).collect())
    }

    fn reference_effect(&self, system: &SystemType) -> Result<Vec<f64>, EngineError> {
        Ok(hermitian_to_real(&linalg::identity(dimension_of(system)?)))
    }
}

impl EffectSpace for ClassicalBackend {
    fn effect_dimension(&self, system: &SystemType) -> Result<usize, EngineError> {
        dimension_of(system)
    }

    fn spanning_states(&self, system: &SystemType) -> Result<Vec<Vec<f64>>, EngineError> {
        let n = dimension_of(system)?;
        Ok((0..n).map(|k| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect()).collect())
    }

    fn reference_effect(&self, system: &SystemType) -> Result<Vec<f64>, EngineError> {
        Ok(alloc::vec![1.0; dimension_of(system)?])
    }
}

/// Least-squares solution of `⟨e, s_k⟩ = 1` over the spanning states.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectSolution {
    pub solution: Vec<f64>,
    pub rank: usize,
    pub dimension: usize,
    /// Largest `|⟨e, s_k⟩ − 1|` at the solution.
    pub residual: f64,
}

impl EffectSolution {
    pub fn is_unique(&self) -> bool {
        self.rank == self.dimension
    }
}

const RANK_EPS: f64 = 1e-10;

pub fn solve_deterministic_effect<S: EffectSpace + ?Sized>(
    space: &S,
    system: &SystemType,
) -> Result<EffectSolution, EngineError> {
    let n = space.effect_dimension(system)?;
    let states = space.spanning_states(system)?;
    if states.is_empty() || n == 0 {
        return Err(EngineError::NoEffectSpace(format!("{} (no spanning states)", system.label)));
    }
    if let Some(bad) = states.iter().find(|s| s.len() != n) {
        return Err(EngineError::ShapeMismatch { expected: n, found: bad.len() });
    }
    let m = DMatrix::from_fn(states.len(), n, |i, j| states[i][j]);
    let ones = DVector::from_element(states.len(), 1.0);
    let svd = m.clone().svd(true, true);
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_EPS * largest.max(1.0)).count();
    let x = svd.solve(&ones, RANK_EPS * largest.max(1.0)).map_err(|e| EngineError::InvalidArgument(e.into()))?;
    let residual = (&m * &x - ones).amax();
    Ok(EffectSolution { solution: x.iter().copied().collect(), rank, dimension: n, residual })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> (f64, usize) {
    a.iter().zip(b).enumerate().fold((0.0, 0), |best, (i, (x, y))| {
        let d = (x - y).abs();
        if d > best.0 {
            (d, i)
        } else {
            best
        }
    })
}

/// Check that the deterministic effect of `system` is unique and equals the
/// backend's reference effect.
pub fn check_deterministic_effect_uniqueness<S: EffectSpace + ?Sized>(
    space: &S,
    system: &SystemType,
) -> Result<CausalityReport, EngineError> {
    let sol = solve_deterministic_effect(space, system)?;
    let reference = space.reference_effect(system)?;
    if reference.len() != sol.dimension {
        return Err(EngineError::ShapeMismatch { expected: sol.dimension, found: reference.len() });
    }
    let states = space.spanning_states(system)?;
    let (mut deviation, at) = max_abs_diff(&sol.solution, &reference);
    let mut witness: String = format!("solution differs from the reference effect by {deviation} at coordinate {at}");
    if sol.residual > deviation {
        deviation = sol.residual;
        witness = format!("no exact solution: residual {}", sol.residual);
    }
    for (k, c) in space.candidate_effects(system)?.iter().enumerate() {
        if c.len() != sol.dimension {
            continue;
        }
        let normalizing = states
            .iter()
            .all(|s| (s.iter().zip(c).map(|(a, b)| a * b).sum::<f64>() - 1.0).abs() <= tolerance::OPERATOR);
        let (d, i) = max_abs_diff(c, &reference);
        if normalizing && d > deviation {
            deviation = d;
            witness =
                format!("candidate effect {k} is normalizing and differs from the reference by {d} at coordinate {i}");
        }
    }
    if !sol.is_unique() && deviation < 1.0 {
        deviation = 1.0;
        witness = format!("rank {} < dimension {}: normalizing effects form an affine family", sol.rank, sol.dimension);
    }
    let notes = alloc::vec![
        format!("system {} ({})", system.label, system.descriptor),
        format!("rank {} of {}, residual {}", sol.rank, sol.dimension, sol.residual),
    ];
    Ok(CausalityReport::new(CheckKind::Uniqueness, tolerance::OPERATOR, deviation, witness, notes))
}
