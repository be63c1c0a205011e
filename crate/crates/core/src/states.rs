//! Probe states: pretty good states raised from an extremal generator eigenstate,
//! noiseless-optimal superpositions, GHZ, product and Dicke states.

use std::f64::consts::FRAC_1_SQRT_2;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, ONE};
use crate::operators::{self, HamiltonianKind, HermitianOperator, DEFAULT_DEGENERACY_TOL};
use crate::su2::{ladder_pair, Axis, Su2Generators};

const NORM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;

/// A raising step whose norm falls below this multiple of `c` counts as annihilation.
const ANNIHILATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(CVector),
    Mixed(CMatrix),
}

impl QuantumState {
    /// Pure state; the vector must already be normalised.
    pub fn pure(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state vector has norm {norm}, expected 1")));
        }
        Ok(QuantumState::Pure(v))
    }

    pub fn normalized(mut v: CVector) -> Result<Self> {
        let norm = v.norm();
        if norm < NORM_TOL {
            return Err(Error::AnnihilatedState { k: 0, norm });
        }
        v /= c(norm, 0.0);
        Ok(QuantumState::Pure(v))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&a| c(a, 0.0))))
    }

    /// Density matrix with unit trace, Hermitian and positive within tolerance.
    pub fn mixed(rho: CMatrix) -> Result<Self> {
        let deviation = linalg::hermitian_deviation(&rho);
        if deviation > TRACE_TOL {
            return Err(Error::NonHermitianInput { deviation });
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("density matrix has trace {trace}, expected 1")));
        }
        let lowest = linalg::hermitian_eigenvalues(&rho).last().copied().unwrap_or(0.0);
        if lowest < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("density matrix has eigenvalue {lowest}")));
        }
        Ok(QuantumState::Mixed(rho))
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(v) => v.len(),
            QuantumState::Mixed(m) => m.nrows(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, QuantumState::Pure(_))
    }

    pub fn vector(&self) -> Option<&CVector> {
        match self {
            QuantumState::Pure(v) => Some(v),
            QuantumState::Mixed(_) => None,
        }
    }

    pub fn density_matrix(&self) -> CMatrix {
        match self {
            QuantumState::Pure(v) => linalg::outer(v, v),
            QuantumState::Mixed(m) => m.clone(),
        }
    }

    /// `|⟨a|b⟩|` for pure states; 1 means equal up to a global phase.
    pub fn overlap(&self, other: &QuantumState) -> Option<f64> {
        Some(linalg::fidelity_overlap(self.vector()?, other.vector()?))
    }

    pub fn expectation(&self, op: &CMatrix) -> Result<Complex64> {
        check_dim(op.nrows(), self.dim())?;
        Ok(match self {
            QuantumState::Pure(v) => linalg::expectation(v, op),
            QuantumState::Mixed(m) => linalg::trace_product(m, op),
        })
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Which vector to return from a degenerate ground space.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundSelector {
    /// First vector of the canonical basis of the lowest level.
    First,
    /// Combination of the canonical ground-space basis with these coefficients.
    Combination(Vec<Complex64>),
}

/// Normalised eigenvector of the smallest eigenvalue of `op`.
pub fn ground_state(op: &HermitianOperator, selector: &GroundSelector) -> Result<QuantumState> {
    let spec = operators::spectral_decompose(op, DEFAULT_DEGENERACY_TOL)?;
    let last = spec.levels().len() - 1;
    let multiplicity = spec.levels()[last].multiplicity;
    match selector {
        GroundSelector::First => QuantumState::normalized(spec.vector(last, 0)),
        GroundSelector::Combination(coeffs) => {
            check_dim(multiplicity, coeffs.len())?;
            let mut v = CVector::zeros(op.dim());
            for (i, &a) in coeffs.iter().enumerate() {
                v += spec.vector(last, i) * a;
            }
            QuantumState::normalized(v)
        }
    }
}

fn basis_state(n: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(1 << n);
    v[index] = ONE;
    v
}

/// Index of the alternating string starting with `first` on qubit 1.
pub fn alternating_index(n: usize, first: usize) -> usize {
    (0..n).fold(0, |acc, q| (acc << 1) | ((q + first) % 2))
}

/// `cos(α/2)|0101…⟩ + sin(α/2)|1010…⟩`, a ground state of the Ising chain for every `α`.
pub fn nn_ground_superposition(n: usize, alpha: f64) -> Result<QuantumState> {
    if n < 2 {
        return Err(Error::SizeTooSmall { n, min: 2 });
    }
    let mut v = CVector::zeros(1 << n);
    v[alternating_index(n, 0)] += c((alpha / 2.0).cos(), 0.0);
    v[alternating_index(n, 1)] += c((alpha / 2.0).sin(), 0.0);
    QuantumState::normalized(v)
}

/// Default excitation number: the integer in `0..=2 j_max` closest to `j_max`, ties going down.
pub fn default_excitation(j_max: f64) -> usize {
    let top = (2.0 * j_max).round() as usize;
    (0..=top)
        .min_by(|&a, &b| (a as f64 - j_max).abs().total_cmp(&(b as f64 - j_max).abs()))
        .unwrap_or(0)
}

/// `J_+^k |ψ_min⟩` for the ladder of `axis`, normalised, with `|ψ_min⟩` the first ground vector of `S_axis`.
pub fn pretty_good_state(gens: &Su2Generators, axis: Axis, k: Option<usize>) -> Result<QuantumState> {
    let ground = ground_state(&gens.operator(axis), &GroundSelector::First)?;
    pretty_good_state_from(gens, axis, &ground, k)
}

/// As [`pretty_good_state`] but raising an explicitly supplied extremal state.
pub fn pretty_good_state_from(
    gens: &Su2Generators,
    axis: Axis,
    ground: &QuantumState,
    k: Option<usize>,
) -> Result<QuantumState> {
    let start = ground.vector().ok_or(Error::MixedInput)?;
    check_dim(gens.dim(), start.len())?;
    let k = k.unwrap_or_else(|| default_excitation(gens.j_max()));
    raise(gens, axis, start, k)
}

/// Normalised `J_+^k v`.
pub fn raise(gens: &Su2Generators, axis: Axis, start: &CVector, k: usize) -> Result<QuantumState> {
    let ladder = ladder_pair(gens, axis);
    let threshold = ANNIHILATION_TOL * gens.structure_constant().abs().max(1.0);
    let mut v = start / c(start.norm(), 0.0);
    let mut total = 1.0;
    for _ in 0..k {
        v = &ladder.raise * v;
        let step = v.norm();
        total *= step;
        if step < threshold {
            return Err(Error::AnnihilatedState { k, norm: total });
        }
        v /= c(step, 0.0);
    }
    Ok(QuantumState::Pure(v))
}

/// Single-qubit basis for Dicke states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DickeBasis {
    Z,
    X,
}

impl FromStr for DickeBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z" | "Z" => Ok(DickeBasis::Z),
            "x" | "X" => Ok(DickeBasis::X),
            other => Err(Error::UnknownBasis(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceKind {
    /// `(|Λ_min⟩ + e^{iφ}|Λ_max⟩)/√2`.
    Optimal { phase: f64 },
    /// Noiseless-optimal Ising-chain state balanced under the global spin flip.
    BalancedOptimal { phase: f64 },
    Ghz,
    ProductPlus,
    Dicke { excitations: usize, basis: DickeBasis },
}

/// Reference probe state for the Hamiltonian `h` of the given kind.
pub fn reference_state(kind: &ReferenceKind, hamiltonian: HamiltonianKind, h: &HermitianOperator) -> Result<QuantumState> {
    let n = h.qubits();
    match kind {
        ReferenceKind::Optimal { phase } => {
            let (low, high) = if hamiltonian == HamiltonianKind::NearestNeighbor {
                (basis_state(n, alternating_index(n, 1)), basis_state(n, 0))
            } else {
                let spec = operators::spectral_decompose(h, DEFAULT_DEGENERACY_TOL)?;
                (spec.vector(spec.levels().len() - 1, 0), spec.vector(0, 0))
            };
            QuantumState::normalized(low + high * Complex64::from_polar(1.0, *phase))
        }
        ReferenceKind::BalancedOptimal { phase } => {
            if hamiltonian != HamiltonianKind::NearestNeighbor {
                return reference_state(&ReferenceKind::Optimal { phase: *phase }, hamiltonian, h);
            }
            nn_balanced_optimal(n, *phase)
        }
        ReferenceKind::Ghz => ghz_state(n),
        ReferenceKind::ProductPlus => Ok(product_plus(n)),
        ReferenceKind::Dicke { excitations, basis } => dicke_state(n, *excitations, *basis),
    }
}

/// `½(|0…0⟩ + |1…1⟩) + ½ e^{iφ}(|0101…⟩ + |1010…⟩)`: maximal Ising-chain variance, invariant under `σx^⊗n`.
pub fn nn_balanced_optimal(n: usize, phase: f64) -> Result<QuantumState> {
    if n < 2 {
        return Err(Error::SizeTooSmall { n, min: 2 });
    }
    let top = basis_state(n, 0) + basis_state(n, (1 << n) - 1);
    let bottom = basis_state(n, alternating_index(n, 0)) + basis_state(n, alternating_index(n, 1));
    QuantumState::normalized(top + bottom * Complex64::from_polar(1.0, phase))
}

pub fn ghz_state(n: usize) -> Result<QuantumState> {
    let mut v = CVector::zeros(1 << n);
    v[0] = c(FRAC_1_SQRT_2, 0.0);
    v[(1 << n) - 1] = c(FRAC_1_SQRT_2, 0.0);
    Ok(QuantumState::Pure(v))
}

/// `|+⟩^⊗n`.
pub fn product_plus(n: usize) -> QuantumState {
    let dim = 1usize << n;
    QuantumState::Pure(CVector::from_element(dim, c(1.0 / (dim as f64).sqrt(), 0.0)))
}

/// Uniform superposition of all strings with `excitations` ones, in the chosen single-qubit basis.
pub fn dicke_state(n: usize, excitations: usize, basis: DickeBasis) -> Result<QuantumState> {
    if excitations > n {
        return Err(Error::KOutOfRange { k: excitations as f64, max: n as f64 });
    }
    let dim = 1usize << n;
    let members: Vec<usize> = (0..dim).filter(|x| x.count_ones() as usize == excitations).collect();
    let amp = 1.0 / (members.len() as f64).sqrt();
    let mut v = CVector::zeros(dim);
    for &x in &members {
        v[x] = c(amp, 0.0);
    }
    if basis == DickeBasis::X {
        v = hadamard_all(&v, n);
    }
    QuantumState::normalized(v)
}

/// `H^⊗n v` with the Hadamard gate on every qubit.
fn hadamard_all(v: &CVector, n: usize) -> CVector {
    let mut out = v.clone();
    let s = FRAC_1_SQRT_2;
    for q in 0..n {
        let bit = 1usize << (n - 1 - q);
        for x in 0..out.len() {
            if x & bit == 0 {
                let a = out[x];
                let b = out[x | bit];
                out[x] = (a + b) * s;
                out[x | bit] = (a - b) * s;
            }
        }
    }
    out
}

/// `⟨H²⟩ − ⟨H⟩²`, clamped at zero.
pub fn variance(state: &QuantumState, h: &HermitianOperator) -> Result<f64> {
    check_dim(h.dim(), state.dim())?;
    let value = match state {
        QuantumState::Pure(v) => {
            let hv = h.matrix() * v;
            let mean = v.dotc(&hv).re;
            hv.norm_squared() - mean * mean
        }
        QuantumState::Mixed(rho) => {
            let rh = rho * h.matrix();
            let mean = rh.trace().re;
            linalg::trace_product(&rh, h.matrix()).re - mean * mean
        }
    };
    Ok(if value < 0.0 && value > -POSITIVITY_TOL { 0.0 } else { value.max(0.0) })
}

/// `(c²/2)(j_max(j_max + 1) − (k − j_max)²)`, the variance of a state raised `k` times from the bottom.
pub fn pg_variance_closed_form(j_max: f64, k: usize, c_gap: f64) -> Result<f64> {
    let top = 2.0 * j_max;
    if (k as f64) > top + 1e-9 {
        return Err(Error::KOutOfRange { k: k as f64, max: top });
    }
    let m = k as f64 - j_max;
    Ok(0.5 * c_gap * c_gap * (j_max * (j_max + 1.0) - m * m))
}
