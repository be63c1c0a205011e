//! Dense complex matrix helpers shared by every module.
//!
//! Qubit 1 is the most significant bit of a computational-basis index, so
//! qubit `i` (0-based from the left) of an `n`-qubit index `x` is bit `n - 1 - i`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Bit of qubit `qubit` (0-based from the most significant end) in `index`.
#[inline]
pub fn qubit_bit(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

/// Number of qubits for a power-of-two dimension.
pub fn qubit_count(dim: usize) -> Option<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        None
    } else {
        Some(dim.trailing_zeros() as usize)
    }
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise deviation of `m` from its conjugate transpose.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Upper bound on the spectral radius (maximum absolute row sum).
pub fn row_sum_norm(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// `exp(i θ H)` for Hermitian `H`.
pub fn unitary_exp(h: &CMatrix, theta: f64) -> CMatrix {
    if is_diagonal(h) {
        return CMatrix::from_diagonal(&CVector::from_fn(h.nrows(), |i, _| {
            Complex64::from_polar(1.0, theta * h[(i, i)].re)
        }));
    }
    let (values, vectors) = hermitian_eigen(h);
    let phases = CVector::from_iterator(values.len(), values.iter().map(|&l| Complex64::from_polar(1.0, theta * l)));
    let scaled = CMatrix::from_fn(h.nrows(), values.len(), |r, k| vectors[(r, k)] * phases[k]);
    scaled * vectors.adjoint()
}

pub fn is_diagonal(m: &CMatrix) -> bool {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j && m[(i, j)] != ZERO {
                return false;
            }
        }
    }
    true
}

/// Real diagonal of a matrix that is exactly diagonal with real entries.
pub fn real_diagonal(m: &CMatrix) -> Option<Vec<f64>> {
    if !is_diagonal(m) || (0..m.nrows()).any(|i| m[(i, i)].im != 0.0) {
        return None;
    }
    Some((0..m.nrows()).map(|i| m[(i, i)].re).collect())
}

/// `⟨ψ|A|ψ⟩`.
pub fn expectation(psi: &CVector, a: &CMatrix) -> Complex64 {
    psi.dotc(&(a * psi))
}

/// Trace of `A B` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// Multiplies by the phase that makes the first component above `tol` real and positive.
pub fn fix_phase(v: &mut CVector, tol: f64) {
    if let Some(z) = v.iter().find(|z| z.norm() > tol).copied() {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

/// Overlap `|⟨a|b⟩| / (‖a‖ ‖b‖)`; 1 means equal up to a global phase.
pub fn fidelity_overlap(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm() / (a.norm() * b.norm())
}
