//! Quantum Fisher information for the phase `θ` imprinted by `e^{iθH}`.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{self, DephasingChannel};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, I};
use crate::operators::HermitianOperator;
use crate::states::{self, QuantumState};

/// Pairs with `λ_α + λ_β` at or below this fraction of `Tr ρ` are dropped.
pub const NULL_SPACE_CUTOFF: f64 = 1e-12;

const DERIVATIVE_HERMITIAN_TOL: f64 = 1e-10;
const COMMUTATION_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QfiMethod {
    PureVariance,
    SldGeneral,
    DephasedSpectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QfiResult {
    pub value: f64,
    pub method: QfiMethod,
}

impl QfiResult {
    fn new(value: f64, method: QfiMethod) -> Self {
        Self { value: value.max(0.0), method }
    }
}

/// `4 ΔH²`.
pub fn qfi_pure(state: &QuantumState, h: &HermitianOperator) -> Result<QfiResult> {
    if !state.is_pure() {
        return Err(Error::MixedInput);
    }
    Ok(QfiResult::new(4.0 * states::variance(state, h)?, QfiMethod::PureVariance))
}

fn cutoff(rho: &CMatrix) -> f64 {
    NULL_SPACE_CUTOFF * rho.trace().re.abs().max(f64::MIN_POSITIVE)
}

/// Symmetric logarithmic derivative solving `dρ = (Lρ + ρL)/2` on the support of `ρ`.
pub fn sld(rho: &QuantumState, drho: &CMatrix) -> Result<CMatrix> {
    let rho = rho.density_matrix();
    if drho.nrows() != rho.nrows() || drho.ncols() != rho.ncols() {
        return Err(Error::DimensionMismatch { expected: rho.nrows(), actual: drho.nrows() });
    }
    let deviation = linalg::hermitian_deviation(drho);
    if deviation > DERIVATIVE_HERMITIAN_TOL * linalg::max_abs(drho).max(1.0) {
        return Err(Error::NonHermitianDerivative { deviation });
    }
    let eps = cutoff(&rho);
    let (values, vectors) = linalg::hermitian_eigen(&rho);
    let m = vectors.adjoint() * drho * &vectors;
    let dim = values.len();
    let l_eig = CMatrix::from_fn(dim, dim, |a, b| {
        let s = values[a] + values[b];
        if s > eps {
            m[(a, b)] * (2.0 / s)
        } else {
            c(0.0, 0.0)
        }
    });
    Ok(&vectors * l_eig * vectors.adjoint())
}

/// `Tr[L ρ L]` for the output of [`sld`].
pub fn qfi_from_sld(rho: &QuantumState, l: &CMatrix) -> f64 {
    let rho = rho.density_matrix();
    linalg::trace_product(&(&rho * l), l).re.max(0.0)
}

/// QFI of `U(θ) ℰ(ρ) U(θ)†` via the symmetric logarithmic derivative, with `dρ/dθ = i[H, ρ(θ)]`.
pub fn qfi_mixed_sld(state: &QuantumState, h: &HermitianOperator, channel: &DephasingChannel, theta: f64) -> Result<QfiResult> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), actual: state.dim() });
    }
    let noisy = channels::apply_dephasing(state, channel)?;
    let rho_theta = channels::evolve_unitary(&noisy, h, theta)?;
    let rho = rho_theta.density_matrix();
    let drho = linalg::commutator(h.matrix(), &rho) * I;
    let l = sld(&rho_theta, &drho)?;
    Ok(QfiResult::new(qfi_from_sld(&rho_theta, &l), QfiMethod::SldGeneral))
}

/// `2 Σ_{i≠j} (λ_i − λ_j)²/(λ_i + λ_j) |⟨i|H|j⟩|²` over the spectrum of `ρ`.
pub fn spectral_qfi(rho: &CMatrix, h: &CMatrix) -> f64 {
    let eps = cutoff(rho);
    let (values, vectors) = linalg::hermitian_eigen(rho);
    let m = vectors.adjoint() * h * &vectors;
    let mut total = 0.0;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let s = values[i] + values[j];
            if s > eps {
                let d = values[i] - values[j];
                total += 4.0 * d * d / s * m[(i, j)].norm_sqr();
            }
        }
    }
    total.max(0.0)
}

/// Dense spectral evaluation for a pure input sent through dephasing.
///
/// Fails with `NonCommutingNoise` when `ℰ(i[H, ρ]) ≠ i[H, ℰ(ρ)]` for this input.
pub fn qfi_dephased_spectral(state: &QuantumState, h: &HermitianOperator, channel: &DephasingChannel) -> Result<QfiResult> {
    let psi = state.vector().ok_or(Error::MixedInput)?;
    if psi.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), actual: psi.len() });
    }
    let rho = channels::dephase_pure(psi, channel)?;
    if h.real_diagonal().is_none() {
        let pure = linalg::outer(psi, psi);
        let before = channels::dephase_matrix(&linalg::commutator(h.matrix(), &pure), channel)?;
        let after = linalg::commutator(h.matrix(), &rho);
        let residual = linalg::max_abs(&(before - after));
        if residual > COMMUTATION_TOL * h.spectral_radius_bound().max(1.0) {
            return Err(Error::NonCommutingNoise { residual });
        }
    }
    Ok(QfiResult::new(spectral_qfi(&rho, h.matrix()), QfiMethod::DephasedSpectral))
}

/// Dephased QFI through the sector engine when it applies, the dense path otherwise.
pub fn qfi_dephased(state: &QuantumState, h: &HermitianOperator, channel: &DephasingChannel) -> Result<QfiResult> {
    if let Some(psi) = state.vector() {
        if let Some(engine) = DephasedQfiEngine::new(psi, h) {
            return Ok(QfiResult::new(engine.qfi(channel)?, QfiMethod::DephasedSpectral));
        }
    }
    qfi_dephased_spectral(state, h, channel)
}

/// A basis permutation `x ↦ g(x)` that is its own inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Involution {
    Flip,
    Reverse,
    FlipReverse,
}

impl Involution {
    fn apply(self, x: usize, n: usize) -> usize {
        let full = (1usize << n) - 1;
        match self {
            Involution::Flip => x ^ full,
            Involution::Reverse => reverse_bits(x, n),
            Involution::FlipReverse => reverse_bits(x, n) ^ full,
        }
    }
}

fn reverse_bits(x: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, q| (acc << 1) | ((x >> q) & 1))
}

/// Symmetry-adapted basis vector: `(index, coefficient)` pairs.
type SectorVector = Vec<(usize, f64)>;

/// Fast dephased QFI for diagonal `H` and states with basis-permutation symmetries.
///
/// Global spin flip and chain reversal preserve Hamming distances, so when they
/// leave both the diagonal of `H` and `|ψ⟩` (up to sign) invariant, the dephased
/// state and `H` are block diagonal in their joint sectors and the QFI is a sum
/// over blocks. Real amplitudes use a real eigensolver.
#[derive(Debug, Clone)]
pub struct DephasedQfiEngine {
    n: usize,
    psi: CVector,
    real: Option<Vec<f64>>,
    sectors: Vec<(Vec<SectorVector>, Vec<f64>)>,
}

impl DephasedQfiEngine {
    /// `None` unless `H` is diagonal with real entries and the dimension matches.
    pub fn new(psi: &CVector, h: &HermitianOperator) -> Option<Self> {
        let diagonal = h.real_diagonal()?;
        let n = h.qubits();
        if psi.len() != diagonal.len() {
            return None;
        }
        let scale = diagonal.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
        let symmetric = |g| preserves(g, n, psi, &diagonal, scale);
        let generators: Vec<Involution> = match (symmetric(Involution::Flip), symmetric(Involution::Reverse)) {
            (true, true) => vec![Involution::Flip, Involution::Reverse],
            (true, false) => vec![Involution::Flip],
            (false, true) => vec![Involution::Reverse],
            (false, false) if symmetric(Involution::FlipReverse) => vec![Involution::FlipReverse],
            _ => Vec::new(),
        };
        let sectors = build_sectors(n, &generators, &diagonal);
        Some(Self { n, psi: psi.clone(), real: real_amplitudes(psi), sectors })
    }

    /// Sector dimensions, largest first.
    pub fn sector_dims(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self.sectors.iter().map(|(v, _)| v.len()).collect();
        dims.sort_unstable_by(|a, b| b.cmp(a));
        dims
    }

    pub fn qfi(&self, channel: &DephasingChannel) -> Result<f64> {
        if channel.qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: 1 << self.n, actual: 1 << channel.qubits() });
        }
        let table = channel.damping_table();
        let total = match &self.real {
            Some(amps) => self.sectors.iter().map(|(vectors, energies)| block_qfi(amps, vectors, energies, &table)).sum(),
            None => {
                let amps: Vec<Complex64> = self.psi.iter().copied().collect();
                self.sectors.iter().map(|(vectors, energies)| block_qfi(&amps, vectors, energies, &table)).sum()
            }
        };
        Ok(f64::max(total, 0.0))
    }
}

/// Whether `g` preserves the diagonal of `H` and maps `|ψ⟩` to `±|ψ⟩`.
fn preserves(g: Involution, n: usize, psi: &CVector, diagonal: &[f64], scale: f64) -> bool {
    if (0..diagonal.len()).any(|x| (diagonal[g.apply(x, n)] - diagonal[x]).abs() > SYMMETRY_TOL * scale) {
        return false;
    }
    [1.0, -1.0]
        .into_iter()
        .any(|chi| (0..psi.len()).all(|x| (psi[g.apply(x, n)] - psi[x] * chi).norm() <= SYMMETRY_TOL))
}

/// Amplitudes as reals after removing a global phase, if possible.
fn real_amplitudes(psi: &CVector) -> Option<Vec<f64>> {
    let mut v = psi.clone();
    linalg::fix_phase(&mut v, 1e-9);
    v.iter().all(|z| z.im.abs() <= SYMMETRY_TOL).then(|| v.iter().map(|z| z.re).collect())
}

fn build_sectors(n: usize, generators: &[Involution], diagonal: &[f64]) -> Vec<(Vec<SectorVector>, Vec<f64>)> {
    let dim = 1usize << n;
    // Characters of the generators label the sectors.
    let labels: Vec<Vec<f64>> = (0..1usize << generators.len())
        .map(|bits| (0..generators.len()).map(|i| if bits >> i & 1 == 0 { 1.0 } else { -1.0 }).collect())
        .collect();
    let mut visited = vec![false; dim];
    let mut sectors: Vec<(Vec<SectorVector>, Vec<f64>)> = labels.iter().map(|_| (Vec::new(), Vec::new())).collect();
    for x in 0..dim {
        if visited[x] {
            continue;
        }
        // Group elements as products of generator subsets.
        let elements: Vec<(usize, Vec<bool>)> = (0..1usize << generators.len())
            .map(|subset| {
                let mut y = x;
                let mut used = vec![false; generators.len()];
                for (i, g) in generators.iter().enumerate() {
                    if subset >> i & 1 == 1 {
                        y = g.apply(y, n);
                        used[i] = true;
                    }
                }
                (y, used)
            })
            .collect();
        for &(y, _) in &elements {
            visited[y] = true;
        }
        for (s, label) in labels.iter().enumerate() {
            let mut terms: Vec<(usize, f64)> = Vec::new();
            for (y, used) in &elements {
                let weight: f64 = used.iter().zip(label).filter(|(u, _)| **u).map(|(_, &chi)| chi).product();
                match terms.iter_mut().find(|(idx, _)| idx == y) {
                    Some(term) => term.1 += weight,
                    None => terms.push((*y, weight)),
                }
            }
            terms.retain(|&(_, w)| w.abs() > 0.5);
            if terms.is_empty() {
                continue;
            }
            let norm = terms.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
            terms.iter_mut().for_each(|t| t.1 /= norm);
            sectors[s].1.push(diagonal[x]);
            sectors[s].0.push(terms);
        }
    }
    sectors.retain(|(v, _)| !v.is_empty());
    sectors
}

/// Spectral QFI of one sector block; `H` is diagonal there with entries `energies`.
fn block_qfi<T>(amps: &[T], vectors: &[SectorVector], energies: &[f64], table: &[f64]) -> f64
where
    T: ComplexField<RealField = f64> + Copy,
{
    let d = vectors.len();
    let mut rho = DMatrix::<T>::zeros(d, d);
    let mut trace = 0.0;
    for a in 0..d {
        for b in a..d {
            let mut acc = T::zero();
            for &(x, cx) in &vectors[a] {
                for &(y, cy) in &vectors[b] {
                    let w = cx * cy * table[(x ^ y).count_ones() as usize];
                    acc += amps[x] * amps[y].conjugate() * T::from_real(w);
                }
            }
            rho[(a, b)] = acc;
            rho[(b, a)] = acc.conjugate();
        }
        trace += rho[(a, a)].real();
    }
    if trace <= 0.0 {
        return 0.0;
    }
    let eig = rho.symmetric_eigen();
    let values = &eig.eigenvalues;
    let vectors_eig = &eig.eigenvectors;
    let eps = NULL_SPACE_CUTOFF;
    let weighted = DMatrix::<T>::from_fn(d, d, |a, j| vectors_eig[(a, j)] * T::from_real(energies[a]));
    let h_eig = vectors_eig.adjoint() * weighted;
    let mut total = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let s = values[i] + values[j];
            if s <= eps {
                continue;
            }
            let diff = values[i] - values[j];
            total += 4.0 * diff * diff / s * h_eig[(i, j)].modulus_squared();
        }
    }
    total
}
