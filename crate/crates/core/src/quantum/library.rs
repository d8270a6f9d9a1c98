//! Families of complete quantum tests used as alternatives when probing
//! no-signaling, plus seeded random states, channels and tests.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{coarse_grain, KrausMap, QState};
use crate::linalg::{self, CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Computational,
    /// Discrete Fourier basis, mutually unbiased with the computational one.
    Fourier,
}

pub fn basis_vectors(d: usize, basis: Basis) -> Vec<CVector> {
    match basis {
        Basis::Computational => (0..d).map(|k| linalg::basis_vector(d, k)).collect(),
        Basis::Fourier => {
            let norm = 1.0 / (d as f64).sqrt();
            (0..d)
                .map(|k| {
                    CVector::from_fn(d, |j, _| {
                        let theta = 2.0 * core::f64::consts::PI * (j * k) as f64 / d as f64;
                        Complex64::cis(theta) * norm
                    })
                })
                .collect()
        }
    }
}

/// A complete test `d_in → d_out` built from a basis.
///
/// For preparations (`d_in = 1`) this is the uniform ensemble over the
/// output basis. Otherwise it measures the input in the basis and
/// re-prepares outcome `j` as output basis state `j mod d_out`; for
/// observations (`d_out = 1`) that is the basis measurement itself.
pub fn basis_test(d_in: usize, d_out: usize, basis: Basis) -> Vec<KrausMap> {
    if d_in == 1 {
        let w = Complex64::new(1.0 / (d_out as f64).sqrt(), 0.0);
        return basis_vectors(d_out, basis)
            .into_iter()
            .map(|v| {
                KrausMap::from_parts(1, d_out, alloc::vec![CMatrix::from_column_slice(d_out, 1, (v * w).as_slice())])
            })
            .collect();
    }
    let outs = basis_vectors(d_out, basis);
    basis_vectors(d_in, basis)
        .into_iter()
        .enumerate()
        .map(|(j, b)| KrausMap::from_parts(d_in, d_out, alloc::vec![&outs[j % d_out] * b.adjoint()]))
        .collect()
}

/// The one-outcome test obtained by coarse-graining the computational basis test.
pub fn trivial_test(d_in: usize, d_out: usize) -> Vec<KrausMap> {
    let events = basis_test(d_in, d_out, Basis::Computational);
    alloc::vec![coarse_grain(&events).expect("basis test is complete")]
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// A Haar-like random isometry (`rows ≥ cols`), the Q factor of a complex
/// Gaussian matrix.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng));
    g.qr().q()
}

fn stinespring_kraus<R: Rng + ?Sized>(d_in: usize, d_out: usize, count: usize, rng: &mut R) -> Vec<CMatrix> {
    let v = random_isometry(count * d_out, d_in, rng);
    (0..count).map(|a| v.rows(a * d_out, d_out).into_owned()).collect()
}

/// Random trace-preserving map with at least `kraus_count` operators (more
/// when needed to dilate a `d_in`-dimensional input).
pub fn random_channel<R: Rng + ?Sized>(d_in: usize, d_out: usize, kraus_count: usize, rng: &mut R) -> KrausMap {
    let count = kraus_count.max(d_in.div_ceil(d_out)).max(1);
    KrausMap::from_parts(d_in, d_out, stinespring_kraus(d_in, d_out, count, rng))
}

/// Random complete test with `outcomes` outcomes, built by splitting the
/// Kraus operators of a random Stinespring dilation round-robin.
pub fn random_test<R: Rng + ?Sized>(d_in: usize, d_out: usize, outcomes: usize, rng: &mut R) -> Vec<KrausMap> {
    assert!(outcomes >= 1);
    let count = outcomes.max(d_in.div_ceil(d_out));
    let kraus = stinespring_kraus(d_in, d_out, count, rng);
    let mut groups: Vec<Vec<CMatrix>> = (0..outcomes).map(|_| Vec::new()).collect();
    for (a, k) in kraus.into_iter().enumerate() {
        groups[a % outcomes].push(k);
    }
    groups.into_iter().map(|ops| KrausMap::from_parts(d_in, d_out, ops)).collect()
}

/// Random full-rank density operator of unit trace.
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> QState {
    let prep = random_channel(1, d, d, rng);
    QState::from_matrix_unchecked(prep.apply_matrix(&CMatrix::from_element(1, 1, linalg::ONE)))
}

/// Random unitary `d × d`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    random_isometry(d, d, rng)
}

/// Labelled alternative tests for a node of type `d_in → d_out`:
/// computational basis, Fourier basis, the one-outcome deterministic test,
/// and two seeded random complete tests.
pub fn standard_library(d_in: usize, d_out: usize, seed: u64) -> Vec<(String, Vec<KrausMap>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lib = alloc::vec![
        ("computational".to_string(), basis_test(d_in, d_out, Basis::Computational)),
        ("fourier".to_string(), basis_test(d_in, d_out, Basis::Fourier)),
        ("trivial".to_string(), trivial_test(d_in, d_out)),
    ];
    for (i, outcomes) in [2usize, 3].into_iter().enumerate() {
        lib.push((format!("random-{i}"), random_test(d_in, d_out, outcomes, &mut rng)));
    }
    lib
}
