//! Classical theory: transformations are substochastic Markov matrices.
//!
//! Matrices are `n_out × n_in` and act on column probability vectors, so
//! every column indexes an input configuration and sums to at most one. A
//! transformation is deterministic when every column sums to one. Classical
//! theory is the diagonal restriction of quantum theory, see [`embed_matrix`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::CMatrix;
use crate::quantum::{KrausMap, QEffect, QState};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassicalError {
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("invalid system size {0}")]
    InvalidSize(usize),
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("column {column} sums to {sum} > 1")]
    ColumnExceedsOne { column: usize, sum: f64 },
    #[error("effect entry {value} at {index} lies outside [0, 1]")]
    EffectOutOfRange { index: usize, value: f64 },
    #[error("coarse-graining needs at least one matrix")]
    EmptyTest,
}

/// A classical system with `size` configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CSystem {
    size: usize,
}

impl CSystem {
    pub fn new(size: usize) -> Result<Self, ClassicalError> {
        if size == 0 {
            return Err(ClassicalError::InvalidSize(0));
        }
        Ok(CSystem { size })
    }

    pub fn trivial() -> Self {
        CSystem { size: 1 }
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubstochasticMatrix {
    matrix: DMatrix<f64>,
}

impl SubstochasticMatrix {
    /// Entries must be `≥ 0` and column sums `≤ 1`, within [`tolerance::OPERATOR`].
    pub fn new(matrix: DMatrix<f64>) -> Result<Self, ClassicalError> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(ClassicalError::InvalidSize(0));
        }
        for col in 0..matrix.ncols() {
            for row in 0..matrix.nrows() {
                let value = matrix[(row, col)];
                if value < -tolerance::OPERATOR {
                    return Err(ClassicalError::NegativeEntry { row, col, value });
                }
            }
        }
        for (column, c) in matrix.column_iter().enumerate() {
            let sum = c.sum();
            if sum > 1.0 + tolerance::OPERATOR {
                return Err(ClassicalError::ColumnExceedsOne { column, sum });
            }
        }
        Ok(SubstochasticMatrix { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        SubstochasticMatrix { matrix }
    }

    pub fn identity(n: usize) -> Self {
        SubstochasticMatrix { matrix: DMatrix::identity(n, n) }
    }

    /// The preparation `1 → n` producing `p`.
    pub fn from_state(state: &CState) -> Self {
        SubstochasticMatrix { matrix: DMatrix::from_column_slice(state.size(), 1, state.p.as_slice()) }
    }

    /// The observation `n → 1` pairing with `c`.
    pub fn from_effect(effect: &CEffect) -> Self {
        SubstochasticMatrix { matrix: DMatrix::from_row_slice(1, effect.size(), effect.c.as_slice()) }
    }

    pub fn in_size(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn out_size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.matrix.column_iter().map(|c| c.sum()).collect()
    }

    pub fn is_deterministic_within(&self, tol: f64) -> bool {
        self.column_sums().iter().all(|s| (s - 1.0).abs() <= tol)
    }

    /// Every column sums to one within [`tolerance::OPERATOR`].
    pub fn is_deterministic(&self) -> bool {
        self.is_deterministic_within(tolerance::OPERATOR)
    }
}

/// A subnormalized probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CState {
    p: DVector<f64>,
}

impl CState {
    pub fn new(p: Vec<f64>) -> Result<Self, ClassicalError> {
        if p.is_empty() {
            return Err(ClassicalError::InvalidSize(0));
        }
        for (row, &value) in p.iter().enumerate() {
            if value < -tolerance::OPERATOR {
                return Err(ClassicalError::NegativeEntry { row, col: 0, value });
            }
        }
        let sum: f64 = p.iter().sum();
        if sum > 1.0 + tolerance::OPERATOR {
            return Err(ClassicalError::ColumnExceedsOne { column: 0, sum });
        }
        Ok(CState { p: DVector::from_vec(p) })
    }

    /// The point mass on configuration `k`.
    pub fn point(n: usize, k: usize) -> Self {
        let mut p = DVector::zeros(n);
        p[k] = 1.0;
        CState { p }
    }

    pub fn uniform(n: usize) -> Self {
        CState { p: DVector::from_element(n, 1.0 / n as f64) }
    }

    pub fn size(&self) -> usize {
        self.p.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        self.p.as_slice()
    }

    pub fn mass(&self) -> f64 {
        self.p.sum()
    }

    pub fn is_deterministic(&self) -> bool {
        (self.mass() - 1.0).abs() <= tolerance::OPERATOR
    }
}

/// A classical effect: a covector with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CEffect {
    c: DVector<f64>,
}

impl CEffect {
    pub fn new(c: Vec<f64>) -> Result<Self, ClassicalError> {
        if c.is_empty() {
            return Err(ClassicalError::InvalidSize(0));
        }
        for (index, &value) in c.iter().enumerate() {
            if !(-tolerance::OPERATOR..=1.0 + tolerance::OPERATOR).contains(&value) {
                return Err(ClassicalError::EffectOutOfRange { index, value });
            }
        }
        Ok(CEffect { c: DVector::from_vec(c) })
    }

    pub fn size(&self) -> usize {
        self.c.len()
    }

    pub fn values(&self) -> &[f64] {
        self.c.as_slice()
    }

    pub fn pair(&self, state: &CState) -> Result<f64, ClassicalError> {
        if self.size() != state.size() {
            return Err(ClassicalError::SizeMismatch { expected: self.size(), found: state.size() });
        }
        Ok(self.c.dot(&state.p))
    }
}

/// `p ↦ M p`
pub fn c_apply(m: &SubstochasticMatrix, s: &CState) -> Result<CState, ClassicalError> {
    if m.in_size() != s.size() {
        return Err(ClassicalError::SizeMismatch { expected: m.in_size(), found: s.size() });
    }
    Ok(CState { p: &m.matrix * &s.p })
}

/// `f` followed by `g`, i.e. the product `G F`.
pub fn c_compose_seq(f: &SubstochasticMatrix, g: &SubstochasticMatrix) -> Result<SubstochasticMatrix, ClassicalError> {
    if f.out_size() != g.in_size() {
        return Err(ClassicalError::SizeMismatch { expected: g.in_size(), found: f.out_size() });
    }
    Ok(SubstochasticMatrix { matrix: &g.matrix * &f.matrix })
}

/// `f ⊗ g`, the Kronecker product with `f`'s configuration most significant.
pub fn c_compose_par(f: &SubstochasticMatrix, g: &SubstochasticMatrix) -> SubstochasticMatrix {
    SubstochasticMatrix { matrix: f.matrix.kronecker(&g.matrix) }
}

/// Sum of the matrices, validated as substochastic.
pub fn c_coarse_grain(events: &[SubstochasticMatrix]) -> Result<SubstochasticMatrix, ClassicalError> {
    let first = events.first().ok_or(ClassicalError::EmptyTest)?;
    let mut acc = DMatrix::zeros(first.out_size(), first.in_size());
    for e in events {
        if e.matrix.shape() != acc.shape() {
            return Err(ClassicalError::SizeMismatch { expected: first.in_size(), found: e.in_size() });
        }
        acc += &e.matrix;
    }
    SubstochasticMatrix::new(acc)
}

/// The all-ones covector; pairing it with `p` gives the total mass.
pub fn c_deterministic_effect(system: CSystem) -> CEffect {
    CEffect { c: DVector::from_element(system.size(), 1.0) }
}

/// `M ↦ {√M_ji |j⟩⟨i| : M_ji > 0}`, a dephasing CP map acting as `M` on diagonals.
pub fn embed_matrix(m: &SubstochasticMatrix) -> KrausMap {
    let (n_out, n_in) = m.matrix.shape();
    let mut ops = Vec::new();
    for i in 0..n_in {
        for j in 0..n_out {
            let v = m.matrix[(j, i)];
            if v > 0.0 {
                let mut k = CMatrix::zeros(n_out, n_in);
                k[(j, i)] = Complex64::new(v.sqrt(), 0.0);
                ops.push(k);
            }
        }
    }
    if ops.is_empty() {
        return KrausMap::zero(n_in, n_out);
    }
    KrausMap::from_parts(n_in, n_out, ops)
}

/// `p ↦ diag(p)`
pub fn embed_state(s: &CState) -> QState {
    let diag = s.p.map(|x| Complex64::new(x, 0.0));
    QState::from_matrix_unchecked(CMatrix::from_diagonal(&diag))
}

/// `c ↦ diag(c)`
pub fn embed_effect(c: &CEffect) -> QEffect {
    let diag = c.c.map(|x| Complex64::new(x, 0.0));
    QEffect::new(CMatrix::from_diagonal(&diag)).expect("diagonal of [0,1] entries is an effect")
}

/// A complete classical test from the computational basis: the uniform
/// ensemble for preparations, otherwise read configuration `i` and write
/// `i mod n_out`.
pub fn basis_test(n_in: usize, n_out: usize) -> Vec<SubstochasticMatrix> {
    if n_in == 1 {
        return (0..n_out)
            .map(|j| {
                let mut m = DMatrix::zeros(n_out, 1);
                m[(j, 0)] = 1.0 / n_out as f64;
                SubstochasticMatrix { matrix: m }
            })
            .collect();
    }
    (0..n_in)
        .map(|i| {
            let mut m = DMatrix::zeros(n_out, n_in);
            m[(i % n_out, i)] = 1.0;
            SubstochasticMatrix { matrix: m }
        })
        .collect()
}

/// One-outcome deterministic test, the coarse-graining of [`basis_test`].
pub fn trivial_test(n_in: usize, n_out: usize) -> Vec<SubstochasticMatrix> {
    alloc::vec![c_coarse_grain(&basis_test(n_in, n_out)).expect("basis test is complete")]
}

/// Random complete test: for every input column, a random distribution
/// over (outcome, output) pairs with some entries forced to zero.
pub fn random_test<R: Rng + ?Sized>(
    n_in: usize,
    n_out: usize,
    outcomes: usize,
    rng: &mut R,
) -> Vec<SubstochasticMatrix> {
    assert!(outcomes >= 1);
    let mut mats: Vec<DMatrix<f64>> = (0..outcomes).map(|_| DMatrix::zeros(n_out, n_in)).collect();
    for i in 0..n_in {
        let mut weights: Vec<f64> =
            (0..outcomes * n_out).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen::<f64>() }).collect();
        if weights.iter().all(|w| *w == 0.0) {
            let k = rng.gen_range(0..weights.len());
            weights[k] = 1.0;
        }
        let total: f64 = weights.iter().sum();
        for (k, w) in weights.into_iter().enumerate() {
            mats[k / n_out][(k % n_out, i)] = w / total;
        }
    }
    mats.into_iter().map(SubstochasticMatrix::from_matrix_unchecked).collect()
}

/// Random column-stochastic matrix.
pub fn random_stochastic<R: Rng + ?Sized>(n_in: usize, n_out: usize, rng: &mut R) -> SubstochasticMatrix {
    c_coarse_grain(&random_test(n_in, n_out, 1, rng)).expect("single event")
}

/// Labelled alternative tests for a node of type `n_in → n_out`.
pub fn standard_library(n_in: usize, n_out: usize, seed: u64) -> Vec<(String, Vec<SubstochasticMatrix>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lib = alloc::vec![
        ("computational".to_string(), basis_test(n_in, n_out)),
        ("trivial".to_string(), trivial_test(n_in, n_out)),
    ];
    for (i, outcomes) in [2usize, 3].into_iter().enumerate() {
        lib.push((format!("random-{i}"), random_test(n_in, n_out, outcomes, &mut rng)));
    }
    lib
}

/// The quantum image of a classical test, event by event.
pub fn embed_test(events: &[SubstochasticMatrix]) -> Vec<KrausMap> {
    events.iter().map(embed_matrix).collect()
}
