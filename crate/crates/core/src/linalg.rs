//! Dense complex matrix helpers shared by the backends.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// `|v⟩⟨v|`
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn basis_vector(d: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[k] = ONE;
    v
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// Largest absolute entry of `a - b`; `INFINITY` on shape mismatch.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest eigenvalue of the Hermitian part (`+∞` for a 0×0 matrix).
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(f64::INFINITY)
}

/// Operator norm of a Hermitian matrix (largest |eigenvalue|).
pub fn hermitian_operator_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Eigen-decomposition `m = Σ λ_k |v_k⟩⟨v_k|` of the Hermitian part.
pub fn hermitian_eigen(m: &CMatrix) -> Vec<(f64, CVector)> {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    (0..eig.eigenvalues.len()).map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned())).collect()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Index map for reordering tensor legs.
///
/// `dims` are the leg dimensions in the current order (first leg most
/// significant). The new order lists old leg positions; the returned vector
/// maps each new flat index to the old flat index.
pub fn leg_permutation(dims: &[usize], order: &[usize]) -> Vec<usize> {
    debug_assert_eq!(dims.len(), order.len());
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let mut old_strides = alloc::vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        old_strides[i] = old_strides[i + 1] * dims[i + 1];
    }
    let mut map = Vec::with_capacity(total);
    let mut digits = alloc::vec![0usize; dims.len()];
    for _ in 0..total {
        let old: usize = digits.iter().zip(order).map(|(&d, &o)| d * old_strides[o]).sum();
        map.push(old);
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    map
}

/// `m'[i][j] = m[map[i]][map[j]]`
pub fn permute_square<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>, map: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(map.len(), map.len(), |i, j| m[(map[i], map[j])])
}

/// The permutation matrix `P` with `P|old⟩ = |new⟩` for [`leg_permutation`].
pub fn permutation_matrix(map: &[usize]) -> CMatrix {
    let mut p = CMatrix::zeros(map.len(), map.len());
    for (new, &old) in map.iter().enumerate() {
        p[(new, old)] = ONE;
    }
    p
}

/// Coordinates of a Hermitian `d×d` matrix in an orthonormal real basis of
/// the Hermitian matrices, so that `Tr[A B] = ⟨vec(A), vec(B)⟩`.
pub fn hermitian_to_real(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let s = core::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(s * m[(i, j)].re);
            out.push(s * m[(i, j)].im);
        }
    }
    out
}

/// Inverse of [`hermitian_to_real`].
pub fn real_to_hermitian(v: &[f64], d: usize) -> CMatrix {
    let s = core::f64::consts::SQRT_2;
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = Complex64::new(v[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in i + 1..d {
            let z = Complex64::new(v[k] / s, v[k + 1] / s);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leg_permutation_swaps_two_legs() {
        // dims (2,3): old index = 3a + b; new order (b, a): new index = 2b + a
        let map = leg_permutation(&[2, 3], &[1, 0]);
        assert_eq!(map, [0, 3, 1, 4, 2, 5]);
        assert_eq!(leg_permutation(&[2, 3], &[0, 1]), [0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn permutation_matrix_matches_kron_swap() {
        let a = CMatrix::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, 1.0));
        let b = CMatrix::from_fn(3, 3, |i, j| Complex64::new((i * j) as f64, -(i as f64)));
        let p = permutation_matrix(&leg_permutation(&[2, 3], &[1, 0]));
        let swapped = &p * kron(&a, &b) * p.adjoint();
        assert!(max_abs_diff(&swapped, &kron(&b, &a)) < 1e-14);
    }

    #[test]
    fn real_coordinates_preserve_trace_pairing() {
        let a = CMatrix::from_fn(3, 3, |i, j| Complex64::new((i + j) as f64, i as f64 - j as f64));
        let b = CMatrix::from_fn(3, 3, |i, j| Complex64::new((i * j) as f64 + 1.0, 2.0 * (j as f64 - i as f64)));
        let pairing: f64 = hermitian_to_real(&a).iter().zip(hermitian_to_real(&b)).map(|(x, y)| x * y).sum();
        assert!((pairing - (a.clone() * b).trace().re).abs() < 1e-12);
        assert!(max_abs_diff(&real_to_hermitian(&hermitian_to_real(&a), 3), &a) < 1e-14);
    }

    #[test]
    fn eigenvalues_of_projector() {
        let p = projector(&basis_vector(3, 1));
        let ev = hermitian_eigenvalues(&p);
        assert!((ev[0]).abs() < 1e-14 && (ev[2] - 1.0).abs() < 1e-14);
        assert!((hermitian_operator_norm(&p) - 1.0).abs() < 1e-14);
    }
}
