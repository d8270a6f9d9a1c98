//! Finite-dimensional quantum theory.
//!
//! Transformations `A → B` are completely positive trace-non-increasing maps
//! stored in Kraus form `ρ ↦ Σ_k K_k ρ K_k†`; a transformation is
//! deterministic when it is trace preserving. States are subnormalized
//! density operators, effects are POVM elements `0 ≤ E ≤ I`, and the
//! probability of an effect on a state is `Tr[E ρ]`.
//!
//! The Kraus form is the generative representation; [`KrausMap::choi`]
//! gives the Choi matrix for positivity verification.

pub mod library;

use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::linalg::{self, CMatrix, CVector};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid system dimension {0}")]
    InvalidDimension(usize),
    #[error("Kraus map has no operators")]
    EmptyKraus,
    #[error("Kraus operator {index} is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    KrausShape { index: usize, rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
    #[error("map increases trace: largest eigenvalue of sum K^dag K is {0}")]
    TraceIncreasing(f64),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0})")]
    NotPositive(f64),
    #[error("state trace {0} exceeds 1")]
    TraceExceedsOne(f64),
    #[error("effect exceeds the identity (largest eigenvalue {0})")]
    EffectExceedsIdentity(f64),
    #[error("probability {0} lies outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("coarse-graining needs at least one map")]
    EmptyTest,
}

/// A quantum system, i.e. the dimension of its Hilbert space. The trivial
/// system has dimension 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QSystem {
    dim: usize,
}

impl QSystem {
    pub fn new(dim: usize) -> Result<Self, QuantumError> {
        if dim == 0 {
            return Err(QuantumError::InvalidDimension(dim));
        }
        Ok(QSystem { dim })
    }

    pub fn trivial() -> Self {
        QSystem { dim: 1 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// A CP trace-non-increasing map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    in_dim: usize,
    out_dim: usize,
    ops: Vec<CMatrix>,
}

impl KrausMap {
    /// Checks operator shapes and `Σ K†K ≤ I` within [`tolerance::OPERATOR`].
    pub fn new(in_dim: usize, out_dim: usize, ops: Vec<CMatrix>) -> Result<Self, QuantumError> {
        if in_dim == 0 {
            return Err(QuantumError::InvalidDimension(in_dim));
        }
        if out_dim == 0 {
            return Err(QuantumError::InvalidDimension(out_dim));
        }
        if ops.is_empty() {
            return Err(QuantumError::EmptyKraus);
        }
        for (index, k) in ops.iter().enumerate() {
            if k.shape() != (out_dim, in_dim) {
                return Err(QuantumError::KrausShape {
                    index,
                    rows: k.nrows(),
                    cols: k.ncols(),
                    expected_rows: out_dim,
                    expected_cols: in_dim,
                });
            }
        }
        let map = KrausMap { in_dim, out_dim, ops };
        let top = linalg::hermitian_eigenvalues(&map.gram()).last().copied().unwrap_or(0.0);
        if top > 1.0 + tolerance::OPERATOR {
            return Err(QuantumError::TraceIncreasing(top));
        }
        Ok(map)
    }

    /// For compositions of already validated maps, which stay CP and
    /// trace-non-increasing.
    pub(crate) fn from_parts(in_dim: usize, out_dim: usize, ops: Vec<CMatrix>) -> Self {
        debug_assert!(!ops.is_empty());
        KrausMap { in_dim, out_dim, ops }
    }

    pub fn identity(d: usize) -> Self {
        KrausMap::from_parts(d, d, alloc::vec![linalg::identity(d)])
    }

    /// The map `ρ ↦ 0`.
    pub fn zero(in_dim: usize, out_dim: usize) -> Self {
        KrausMap::from_parts(in_dim, out_dim, alloc::vec![CMatrix::zeros(out_dim, in_dim)])
    }

    /// Single-operator map `ρ ↦ U ρ U†`; `U` must be a contraction.
    pub fn single(op: CMatrix) -> Result<Self, QuantumError> {
        KrausMap::new(op.ncols(), op.nrows(), alloc::vec![op])
    }

    /// The preparation `1 ↦ ρ`, from the spectral decomposition of `ρ`.
    pub fn from_state(state: &QState) -> Self {
        let d = state.dim();
        let mut ops: Vec<CMatrix> = linalg::hermitian_eigen(&state.matrix)
            .into_iter()
            .filter(|(l, _)| *l > 0.0)
            .map(|(l, v)| CMatrix::from_column_slice(d, 1, (v * Complex64::new(l.sqrt(), 0.0)).as_slice()))
            .collect();
        if ops.is_empty() {
            ops.push(CMatrix::zeros(d, 1));
        }
        KrausMap::from_parts(1, d, ops)
    }

    /// The observation `ρ ↦ Tr[E ρ]`, from the spectral decomposition of `E`.
    pub fn from_effect(effect: &QEffect) -> Self {
        let d = effect.dim();
        let mut ops: Vec<CMatrix> = linalg::hermitian_eigen(&effect.matrix)
            .into_iter()
            .filter(|(l, _)| *l > 0.0)
            .map(|(l, v)| v.adjoint().scale(l.sqrt()))
            .map(|row| CMatrix::from_row_slice(1, d, row.as_slice()))
            .collect();
        if ops.is_empty() {
            ops.push(CMatrix::zeros(1, d));
        }
        KrausMap::from_parts(d, 1, ops)
    }

    /// Kraus decomposition of a Choi matrix `Σ_ij |i⟩⟨j| ⊗ T(|i⟩⟨j|)`
    /// (input leg first). Fails unless the Choi matrix is positive
    /// semidefinite, i.e. unless the map is completely positive.
    pub fn from_choi(choi: &CMatrix, in_dim: usize, out_dim: usize) -> Result<Self, QuantumError> {
        let n = in_dim * out_dim;
        if choi.shape() != (n, n) {
            return Err(QuantumError::DimensionMismatch { expected: n, found: choi.nrows() });
        }
        if !linalg::is_hermitian(choi, tolerance::OPERATOR) {
            return Err(QuantumError::NotHermitian);
        }
        let eig = linalg::hermitian_eigen(choi);
        let min = eig.iter().map(|(l, _)| *l).fold(f64::INFINITY, f64::min);
        if min < -tolerance::OPERATOR {
            return Err(QuantumError::NotPositive(min));
        }
        let mut ops = Vec::new();
        for (l, v) in eig {
            if l <= tolerance::OPERATOR * 1e-3 {
                continue;
            }
            let s = l.sqrt();
            // |K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩, so column i of K is the i-th block of v
            ops.push(CMatrix::from_fn(out_dim, in_dim, |r, c| v[c * out_dim + r] * s));
        }
        if ops.is_empty() {
            return Ok(KrausMap::zero(in_dim, out_dim));
        }
        KrausMap::new(in_dim, out_dim, ops)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `Σ_k K_k† K_k`
    pub fn gram(&self) -> CMatrix {
        let mut acc = CMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.ops {
            acc += k.adjoint() * k;
        }
        acc
    }

    /// `Σ_k K_k ρ K_k†` on a raw matrix of matching size.
    pub fn apply_matrix(&self, rho: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.ops {
            acc += k * rho * k.adjoint();
        }
        acc
    }

    /// Choi matrix `Σ_k |K_k⟩⟩⟨⟨K_k|` with `|K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩`.
    pub fn choi(&self) -> CMatrix {
        let n = self.in_dim * self.out_dim;
        let mut acc = CMatrix::zeros(n, n);
        for k in &self.ops {
            let v = CVector::from_fn(n, |idx, _| k[(idx % self.out_dim, idx / self.out_dim)]);
            acc += linalg::projector(&v);
        }
        acc
    }

    /// Choi matrix positive semidefinite within [`tolerance::OPERATOR`].
    pub fn is_completely_positive(&self) -> bool {
        linalg::min_eigenvalue(&self.choi()) >= -tolerance::OPERATOR
    }

    pub fn is_deterministic_within(&self, tol: f64) -> bool {
        let defect = self.gram() - linalg::identity(self.in_dim);
        linalg::hermitian_operator_norm(&defect) <= tol
    }

    /// Trace preserving within [`tolerance::OPERATOR`].
    pub fn is_deterministic(&self) -> bool {
        self.is_deterministic_within(tolerance::OPERATOR)
    }
}

/// A subnormalized density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    matrix: CMatrix,
}

fn check_square(m: &CMatrix) -> Result<(), QuantumError> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(QuantumError::NotSquare(m.nrows(), m.ncols()));
    }
    Ok(())
}

impl QState {
    /// Checks `ρ = ρ†`, `ρ ≥ 0` and `Tr ρ ≤ 1`, all within [`tolerance::OPERATOR`].
    pub fn new(matrix: CMatrix) -> Result<Self, QuantumError> {
        check_square(&matrix)?;
        if !linalg::is_hermitian(&matrix, tolerance::OPERATOR) {
            return Err(QuantumError::NotHermitian);
        }
        let min = linalg::min_eigenvalue(&matrix);
        if min < -tolerance::OPERATOR {
            return Err(QuantumError::NotPositive(min));
        }
        let tr = matrix.trace().re;
        if tr > 1.0 + tolerance::OPERATOR {
            return Err(QuantumError::TraceExceedsOne(tr));
        }
        Ok(QState { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        QState { matrix }
    }

    /// `|ψ⟩⟨ψ|`; `‖ψ‖ ≤ 1` is required.
    pub fn pure(psi: &CVector) -> Result<Self, QuantumError> {
        QState::new(linalg::projector(psi))
    }

    pub fn basis(d: usize, k: usize) -> Self {
        QState { matrix: linalg::projector(&linalg::basis_vector(d, k)) }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        QState { matrix: linalg::identity(d).unscale(d as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_deterministic(&self) -> bool {
        (self.trace() - 1.0).abs() <= tolerance::OPERATOR
    }

    pub fn tensor(&self, other: &QState) -> QState {
        QState { matrix: linalg::kron(&self.matrix, &other.matrix) }
    }

    pub fn scaled(&self, p: f64) -> Result<QState, QuantumError> {
        QState::new(self.matrix.scale(p))
    }
}

/// A POVM element `0 ≤ E ≤ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct QEffect {
    matrix: CMatrix,
}

impl QEffect {
    pub fn new(matrix: CMatrix) -> Result<Self, QuantumError> {
        check_square(&matrix)?;
        if !linalg::is_hermitian(&matrix, tolerance::OPERATOR) {
            return Err(QuantumError::NotHermitian);
        }
        let ev = linalg::hermitian_eigenvalues(&matrix);
        let (min, max) = (ev[0], ev[ev.len() - 1]);
        if min < -tolerance::OPERATOR {
            return Err(QuantumError::NotPositive(min));
        }
        if max > 1.0 + tolerance::OPERATOR {
            return Err(QuantumError::EffectExceedsIdentity(max));
        }
        Ok(QEffect { matrix })
    }

    pub fn projector(v: &CVector) -> Result<Self, QuantumError> {
        QEffect::new(linalg::projector(v))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// `ρ ↦ Σ_k K_k ρ K_k†`
pub fn apply(map: &KrausMap, state: &QState) -> Result<QState, QuantumError> {
    if map.in_dim != state.dim() {
        return Err(QuantumError::DimensionMismatch { expected: map.in_dim, found: state.dim() });
    }
    Ok(QState::from_matrix_unchecked(map.apply_matrix(&state.matrix)))
}

/// `Tr[E ρ]`, clamped into `[0, 1]` when within [`tolerance::OPERATOR`] of the bounds.
pub fn probability(effect: &QEffect, state: &QState) -> Result<f64, QuantumError> {
    if effect.dim() != state.dim() {
        return Err(QuantumError::DimensionMismatch { expected: effect.dim(), found: state.dim() });
    }
    let p = (&effect.matrix * &state.matrix).trace().re;
    clamp_probability(p)
}

pub(crate) fn clamp_probability(p: f64) -> Result<f64, QuantumError> {
    if !(-tolerance::OPERATOR..=1.0 + tolerance::OPERATOR).contains(&p) {
        return Err(QuantumError::ProbabilityOutOfRange(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `f` followed by `g`: Kraus set `{G_j F_k}`.
pub fn compose_seq(f: &KrausMap, g: &KrausMap) -> Result<KrausMap, QuantumError> {
    if f.out_dim != g.in_dim {
        return Err(QuantumError::DimensionMismatch { expected: g.in_dim, found: f.out_dim });
    }
    let mut ops = Vec::with_capacity(f.ops.len() * g.ops.len());
    for gk in &g.ops {
        for fk in &f.ops {
            ops.push(gk * fk);
        }
    }
    Ok(KrausMap::from_parts(f.in_dim, g.out_dim, ops))
}

/// `f ⊗ g` on the composite system (`f`'s leg first): Kraus set `{F_k ⊗ G_j}`.
pub fn compose_par(f: &KrausMap, g: &KrausMap) -> KrausMap {
    let mut ops = Vec::with_capacity(f.ops.len() * g.ops.len());
    for fk in &f.ops {
        for gk in &g.ops {
            ops.push(linalg::kron(fk, gk));
        }
    }
    KrausMap::from_parts(f.in_dim * g.in_dim, f.out_dim * g.out_dim, ops)
}

/// Sum of the maps (concatenated Kraus sets). The result is validated, so
/// coarse-graining events that do not belong to one test fails.
pub fn coarse_grain(maps: &[KrausMap]) -> Result<KrausMap, QuantumError> {
    let first = maps.first().ok_or(QuantumError::EmptyTest)?;
    let mut ops = Vec::new();
    for m in maps {
        if m.in_dim != first.in_dim {
            return Err(QuantumError::DimensionMismatch { expected: first.in_dim, found: m.in_dim });
        }
        if m.out_dim != first.out_dim {
            return Err(QuantumError::DimensionMismatch { expected: first.out_dim, found: m.out_dim });
        }
        ops.extend(m.ops.iter().cloned());
    }
    KrausMap::new(first.in_dim, first.out_dim, ops)
}

/// Trace preserving within [`tolerance::OPERATOR`] (operator norm of `Σ K†K − I`).
pub fn is_deterministic(map: &KrausMap) -> bool {
    map.is_deterministic()
}

/// The trace functional `Tr_A`, i.e. the effect `I_d`.
pub fn deterministic_effect(system: QSystem) -> QEffect {
    QEffect { matrix: linalg::identity(system.dim()) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, max_abs_diff, ONE};
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket0() -> CMatrix {
        linalg::projector(&basis_vector(2, 0))
    }

    fn ket1() -> CMatrix {
        linalg::projector(&basis_vector(2, 1))
    }

    fn hadamard() -> CMatrix {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_row_slice(2, 2, &[c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.)])
    }

    fn sample_state() -> QState {
        QState::new(CMatrix::from_row_slice(2, 2, &[c(0.7, 0.), c(0.1, -0.2), c(0.1, 0.2), c(0.3, 0.)])).unwrap()
    }

    #[test]
    fn identity_channel_leaves_state_unchanged() {
        let rho = sample_state();
        let out = apply(&KrausMap::identity(2), &rho).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn projector_branch_halves_maximally_mixed_state() {
        let branch = KrausMap::single(ket0()).unwrap();
        let out = apply(&branch, &QState::maximally_mixed(2)).unwrap();
        assert!((out.trace() - 0.5).abs() < 1e-15);
        assert!(!branch.is_deterministic());
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let err = apply(&KrausMap::identity(3), &QState::basis(2, 0)).unwrap_err();
        assert_eq!(err, QuantumError::DimensionMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn kraus_validation() {
        assert_eq!(KrausMap::new(2, 2, vec![]), Err(QuantumError::EmptyKraus));
        assert!(matches!(
            KrausMap::new(2, 2, vec![CMatrix::zeros(3, 2)]),
            Err(QuantumError::KrausShape { index: 0, .. })
        ));
        let too_big = linalg::identity(2).scale(1.1);
        assert!(matches!(KrausMap::new(2, 2, vec![too_big]), Err(QuantumError::TraceIncreasing(_))));
    }

    #[test]
    fn eigenstate_probability_is_one() {
        let e = QEffect::new(ket0()).unwrap();
        assert_eq!(probability(&e, &QState::basis(2, 0)).unwrap(), 1.0);
        assert_eq!(probability(&e, &QState::basis(2, 1)).unwrap(), 0.0);
    }

    #[test]
    fn trace_functional_on_deterministic_state_is_one() {
        for d in 1..=4 {
            let sys = QSystem::new(d).unwrap();
            let e = deterministic_effect(sys);
            assert_eq!(e.matrix(), &linalg::identity(d));
            let p = probability(&e, &QState::maximally_mixed(d)).unwrap();
            assert!((p - 1.0).abs() < 1e-15);
        }
        assert_eq!(deterministic_effect(QSystem::trivial()).matrix()[(0, 0)], ONE);
    }

    #[test]
    fn state_and_effect_validation() {
        assert_eq!(QState::new(linalg::identity(2)), Err(QuantumError::TraceExceedsOne(2.0)));
        let neg = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.6, 0.), c(0.6, 0.), c(0.5, 0.)]);
        assert!(matches!(QState::new(neg), Err(QuantumError::NotPositive(_))));
        let skew = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.1, 0.), c(0.2, 0.), c(0.5, 0.)]);
        assert_eq!(QState::new(skew), Err(QuantumError::NotHermitian));
        assert!(matches!(QEffect::new(linalg::identity(2).scale(1.5)), Err(QuantumError::EffectExceedsIdentity(_))));
        assert!(QEffect::new(CMatrix::zeros(2, 3)).is_err());
        assert_eq!(QSystem::new(0), Err(QuantumError::InvalidDimension(0)));
    }

    #[test]
    fn probability_out_of_range_is_an_error() {
        assert!(clamp_probability(1.0 + 1e-10).unwrap() == 1.0);
        assert!(clamp_probability(-1e-10).unwrap() == 0.0);
        assert_eq!(clamp_probability(1.1), Err(QuantumError::ProbabilityOutOfRange(1.1)));
    }

    #[test]
    fn orthogonal_projectors_compose_to_zero() {
        let f = KrausMap::single(ket0()).unwrap();
        let g = KrausMap::single(ket1()).unwrap();
        let h = compose_seq(&f, &g).unwrap();
        for k in 0..2 {
            assert!(apply(&h, &QState::basis(2, k)).unwrap().trace().abs() < 1e-15);
        }
        assert!(apply(&h, &QState::maximally_mixed(2)).unwrap().trace().abs() < 1e-15);
    }

    #[test]
    fn identity_is_unit_of_sequential_composition() {
        let f = KrausMap::new(2, 2, vec![ket0(), hadamard() * ket1()]).unwrap();
        let h = compose_seq(&KrausMap::identity(2), &f).unwrap();
        for k in 0..2 {
            let rho = QState::basis(2, k);
            assert!(max_abs_diff(apply(&h, &rho).unwrap().matrix(), apply(&f, &rho).unwrap().matrix()) < 1e-15);
        }
    }

    #[test]
    fn trivial_system_is_unit_of_parallel_composition() {
        let f = KrausMap::new(2, 2, vec![ket0(), hadamard() * ket1()]).unwrap();
        let g = compose_par(&f, &KrausMap::identity(1));
        assert_eq!(g, f);
        assert_eq!(compose_par(&KrausMap::identity(1), &f), f);
    }

    #[test]
    fn von_neumann_measurement_is_complete() {
        let events = [KrausMap::single(ket0()).unwrap(), KrausMap::single(ket1()).unwrap()];
        assert!(coarse_grain(&events).unwrap().is_deterministic());
        let u = KrausMap::single(hadamard()).unwrap();
        assert_eq!(coarse_grain(core::slice::from_ref(&u)).unwrap(), u);
        assert!(is_deterministic(&u));
        assert_eq!(coarse_grain(&[]), Err(QuantumError::EmptyTest));
        assert!(coarse_grain(&[KrausMap::identity(2), KrausMap::identity(3)]).is_err());
        // two copies of the identity exceed the trace bound
        assert!(coarse_grain(&[KrausMap::identity(2), KrausMap::identity(2)]).is_err());
    }

    #[test]
    fn state_and_effect_kraus_forms() {
        let rho = sample_state();
        let prep = KrausMap::from_state(&rho);
        assert_eq!((prep.in_dim(), prep.out_dim()), (1, 2));
        let out = prep.apply_matrix(&CMatrix::from_element(1, 1, ONE));
        assert!(max_abs_diff(&out, rho.matrix()) < 1e-14);

        let e =
            QEffect::new(CMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.0, 0.2), c(0.0, -0.2), c(0.4, 0.)])).unwrap();
        let obs = KrausMap::from_effect(&e);
        let p = obs.apply_matrix(rho.matrix())[(0, 0)].re;
        assert!((p - probability(&e, &rho).unwrap()).abs() < 1e-14);
        assert!(max_abs_diff(&obs.gram(), e.matrix()) < 1e-14);
    }

    #[test]
    fn choi_round_trip_and_positivity() {
        let f = KrausMap::new(2, 2, vec![ket0(), hadamard() * ket1()]).unwrap();
        assert!(f.is_completely_positive());
        let g = KrausMap::from_choi(&f.choi(), 2, 2).unwrap();
        for rho in [sample_state(), QState::basis(2, 1)] {
            let a = apply(&f, &rho).unwrap();
            let b = apply(&g, &rho).unwrap();
            assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
        }
        // transpose map is positive but not completely positive
        let mut transpose = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                transpose[(i * 2 + j, j * 2 + i)] = ONE;
            }
        }
        assert!(matches!(KrausMap::from_choi(&transpose, 2, 2), Err(QuantumError::NotPositive(_))));
    }
}
