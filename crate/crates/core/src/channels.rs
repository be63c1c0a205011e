//! Local z-dephasing on `n` qubits.
//!
//! The flip probability `p` enters as `ρ ↦ p ρ + (1 − p) σz ρ σz` per qubit, so an
//! off-diagonal entry `(x, y)` is scaled by `(2p − 1)^{h(x ⊕ y)}`. From a rate `γ`
//! and exposure time `t`, `p = (1 + e^{−γt})/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::operators::HermitianOperator;
use crate::states::QuantumState;

/// Largest register for which [`dephasing_kraus`] materialises all `2^n` operators.
pub const MAX_EXPLICIT_KRAUS_QUBITS: usize = 10;

const COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingChannel {
    n: usize,
    p: f64,
    rate_time: Option<(f64, f64)>,
}

impl DephasingChannel {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidChannel(format!("flip probability {p} outside [0, 1]")));
        }
        Ok(Self { n, p, rate_time: None })
    }

    pub fn from_rate(n: usize, gamma: f64, t: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidChannel(format!("dephasing rate {gamma} must be non-negative")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidChannel(format!("exposure time {t} must be non-negative")));
        }
        let p = 0.5 * (1.0 + (-gamma * t).exp());
        Ok(Self { n, p, rate_time: Some((gamma, t)) })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, p: 1.0, rate_time: None }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rate_time(&self) -> Option<(f64, f64)> {
        self.rate_time
    }

    /// Per-qubit coherence factor `2p − 1`.
    pub fn damping(&self) -> f64 {
        2.0 * self.p - 1.0
    }

    /// `q² = 4p(1 − p)`.
    pub fn q2(&self) -> f64 {
        4.0 * self.p * (1.0 - self.p)
    }

    /// `(2p − 1)^h` for `h = 0..=n`.
    pub fn damping_table(&self) -> Vec<f64> {
        let r = self.damping();
        let mut table = Vec::with_capacity(self.n + 1);
        let mut acc = 1.0;
        for _ in 0..=self.n {
            table.push(acc);
            acc *= r;
        }
        table
    }

    fn check(&self, dim: usize) -> Result<()> {
        let expected = 1usize << self.n;
        if dim != expected {
            return Err(Error::DimensionMismatch { expected, actual: dim });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KrausOperator {
    /// Diagonal in the computational basis.
    Diagonal(CVector),
    Dense(CMatrix),
}

impl KrausOperator {
    pub fn dim(&self) -> usize {
        match self {
            KrausOperator::Diagonal(d) => d.len(),
            KrausOperator::Dense(m) => m.nrows(),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match self {
            KrausOperator::Diagonal(d) => CMatrix::from_diagonal(d),
            KrausOperator::Dense(m) => m.clone(),
        }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        match self {
            KrausOperator::Diagonal(d) => d.component_mul(v),
            KrausOperator::Dense(m) => m * v,
        }
    }

    /// `K ρ K†`.
    pub fn conjugate(&self, rho: &CMatrix) -> CMatrix {
        match self {
            KrausOperator::Diagonal(d) => CMatrix::from_fn(rho.nrows(), rho.ncols(), |i, j| d[i] * rho[(i, j)] * d[j].conj()),
            KrausOperator::Dense(m) => m * rho * m.adjoint(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<KrausOperator>,
    labels: Vec<usize>,
}

impl KrausSet {
    /// Operators labelled `0..len`; completeness is checked.
    pub fn new(operators: Vec<KrausOperator>) -> Result<Self> {
        let labels = (0..operators.len()).collect();
        Self::with_labels(operators, labels)
    }

    pub fn with_labels(operators: Vec<KrausOperator>, labels: Vec<usize>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::IncompleteKrausSet { deviation: 1.0 });
        }
        let dim = operators[0].dim();
        if let Some(op) = operators.iter().find(|op| op.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, actual: op.dim() });
        }
        if labels.len() != operators.len() {
            return Err(Error::DimensionMismatch { expected: operators.len(), actual: labels.len() });
        }
        let set = Self { operators, labels };
        let deviation = set.completeness_deviation();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteKrausSet { deviation });
        }
        Ok(set)
    }

    pub fn operators(&self) -> &[KrausOperator] {
        &self.operators
    }

    /// Label of each operator; for dephasing, the bitstring `m` with qubit 1 as the MSB.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    /// Largest entry of `Σ K†K − 𝟙`.
    pub fn completeness_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for op in &self.operators {
            match op {
                KrausOperator::Diagonal(d) => {
                    for i in 0..dim {
                        sum[(i, i)] += c(d[i].norm_sqr(), 0.0);
                    }
                }
                KrausOperator::Dense(m) => sum += m.adjoint() * m,
            }
        }
        for i in 0..dim {
            sum[(i, i)] -= c(1.0, 0.0);
        }
        linalg::max_abs(&sum)
    }
}

/// Diagonal of `S_m = ⊗_i S_{m_i}` with `S_0 = √p 𝟙`, `S_1 = √(1−p) σz`.
pub fn dephasing_kraus_diagonal(n: usize, p: f64, label: usize) -> CVector {
    let weight = label.count_ones() as i32;
    let magnitude = p.sqrt().powi(n as i32 - weight) * (1.0 - p).sqrt().powi(weight);
    CVector::from_fn(1 << n, |x, _| {
        if (label & x).count_ones() % 2 == 0 {
            c(magnitude, 0.0)
        } else {
            c(-magnitude, 0.0)
        }
    })
}

/// All `2^n` dephasing Kraus operators, stored as diagonals.
pub fn dephasing_kraus(channel: &DephasingChannel) -> Result<KrausSet> {
    let n = channel.qubits();
    if n > MAX_EXPLICIT_KRAUS_QUBITS {
        return Err(Error::SizeTooLargeForExplicitKraus { n, max: MAX_EXPLICIT_KRAUS_QUBITS });
    }
    let operators = (0..1usize << n)
        .map(|m| KrausOperator::Diagonal(dephasing_kraus_diagonal(n, channel.p(), m)))
        .collect();
    KrausSet::new(operators)
}

/// Entrywise `ρ_{xy} (2p − 1)^{h(x ⊕ y)}`.
pub fn dephase_matrix(rho: &CMatrix, channel: &DephasingChannel) -> Result<CMatrix> {
    channel.check(rho.nrows())?;
    let table = channel.damping_table();
    Ok(CMatrix::from_fn(rho.nrows(), rho.ncols(), |x, y| rho[(x, y)] * table[(x ^ y).count_ones() as usize]))
}

/// `ℰ(|ψ⟩⟨ψ|)` without forming the projector first.
pub fn dephase_pure(psi: &CVector, channel: &DephasingChannel) -> Result<CMatrix> {
    channel.check(psi.len())?;
    let table = channel.damping_table();
    Ok(CMatrix::from_fn(psi.len(), psi.len(), |x, y| psi[x] * psi[y].conj() * table[(x ^ y).count_ones() as usize]))
}

/// Dephased density matrix of any state.
pub fn apply_dephasing(state: &QuantumState, channel: &DephasingChannel) -> Result<QuantumState> {
    let rho = match state {
        QuantumState::Pure(v) => dephase_pure(v, channel)?,
        QuantumState::Mixed(m) => dephase_matrix(m, channel)?,
    };
    Ok(QuantumState::Mixed(rho))
}

/// `Σ_m K_m ρ K_m†`.
pub fn apply_channel_kraus(state: &QuantumState, kraus: &KrausSet) -> Result<QuantumState> {
    let deviation = kraus.completeness_deviation();
    if deviation > COMPLETENESS_TOL {
        return Err(Error::IncompleteKrausSet { deviation });
    }
    if state.dim() != kraus.dim() {
        return Err(Error::DimensionMismatch { expected: kraus.dim(), actual: state.dim() });
    }
    let rho = state.density_matrix();
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for op in kraus.operators() {
        out += op.conjugate(&rho);
    }
    Ok(QuantumState::Mixed(out))
}

/// `e^{iθH}|ψ⟩` or `e^{iθH} ρ e^{−iθH}`.
pub fn evolve_unitary(state: &QuantumState, h: &HermitianOperator, theta: f64) -> Result<QuantumState> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), actual: state.dim() });
    }
    if let Some(diagonal) = h.real_diagonal() {
        let phases: Vec<Complex64> = diagonal.iter().map(|&e| Complex64::from_polar(1.0, theta * e)).collect();
        return Ok(match state {
            QuantumState::Pure(v) => QuantumState::Pure(CVector::from_fn(v.len(), |i, _| phases[i] * v[i])),
            QuantumState::Mixed(m) => {
                QuantumState::Mixed(CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| phases[i] * m[(i, j)] * phases[j].conj()))
            }
        });
    }
    let u = linalg::unitary_exp(h.matrix(), theta);
    Ok(match state {
        QuantumState::Pure(v) => QuantumState::Pure(&u * v),
        QuantumState::Mixed(m) => QuantumState::Mixed(&u * m * u.adjoint()),
    })
}
