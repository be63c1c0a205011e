//! Qubit Hamiltonians as dense Hermitian matrices and their level structure.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, ONE, ZERO};

/// Relative tolerance (times the spectral radius) for merging eigenvalues into one level.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Components below this magnitude are treated as zero when fixing the basis of a level.
const CANONICAL_ZERO: f64 = 1e-9;

/// Hermiticity tolerance relative to the spectral radius.
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianKind {
    /// `½ Σ σz`
    Local,
    /// `Σ σz σz` on an open chain.
    NearestNeighbor,
    /// `V (Σ σx) V†` with `V` the controlled-phase gates of an open path graph.
    Cluster1d,
    /// `Σ σy σy` on an open chain plus `σx^⊗n + σz^⊗n`.
    NonLocal,
}

impl HamiltonianKind {
    pub const ALL: [HamiltonianKind; 4] = [
        HamiltonianKind::Local,
        HamiltonianKind::NearestNeighbor,
        HamiltonianKind::Cluster1d,
        HamiltonianKind::NonLocal,
    ];

    pub fn label(self) -> &'static str {
        match self {
            HamiltonianKind::Local => "local",
            HamiltonianKind::NearestNeighbor => "nn",
            HamiltonianKind::Cluster1d => "cluster",
            HamiltonianKind::NonLocal => "nonlocal",
        }
    }
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for HamiltonianKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "local" => Ok(HamiltonianKind::Local),
            "nn" | "nearest_neighbor" | "nearest-neighbor" => Ok(HamiltonianKind::NearestNeighbor),
            "cluster" | "cluster_1d" | "cluster-1d" => Ok(HamiltonianKind::Cluster1d),
            "nonlocal" | "non_local" | "non-local" => Ok(HamiltonianKind::NonLocal),
            other => Err(format!("unknown Hamiltonian '{other}' (expected local, nn, cluster or nonlocal)")),
        }
    }
}

/// Dense Hermitian matrix on the `2^n`-dimensional qubit space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), actual: matrix.ncols() });
        }
        if linalg::qubit_count(matrix.nrows()).is_none() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows().next_power_of_two(),
                actual: matrix.nrows(),
            });
        }
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL * linalg::row_sum_norm(&matrix).max(1.0) {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn from_real_diagonal(diagonal: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_diagonal(&CVector::from_iterator(
            diagonal.len(),
            diagonal.iter().map(|&d| c(d, 0.0)),
        )))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Real diagonal when the operator is diagonal in the computational basis.
    pub fn real_diagonal(&self) -> Option<Vec<f64>> {
        linalg::real_diagonal(&self.matrix)
    }

    pub fn spectral_radius_bound(&self) -> f64 {
        linalg::row_sum_norm(&self.matrix)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl TryFrom<char> for Pauli {
    type Error = String;

    fn try_from(ch: char) -> std::result::Result<Self, Self::Error> {
        match ch.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(format!("'{other}' is not a Pauli letter")),
        }
    }
}

/// Tensor product of single-qubit Pauli matrices with a complex prefactor.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    letters: Vec<Pauli>,
    coefficient: Complex64,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, coefficient: Complex64) -> Self {
        Self { letters, coefficient }
    }

    /// Identity everywhere except the listed `(qubit, letter)` sites.
    pub fn on_sites(n: usize, sites: &[(usize, Pauli)], coefficient: Complex64) -> Self {
        let mut letters = vec![Pauli::I; n];
        for &(q, p) in sites {
            letters[q] = p;
        }
        Self { letters, coefficient }
    }

    pub fn parse(word: &str, coefficient: Complex64) -> std::result::Result<Self, String> {
        let letters = word.chars().map(Pauli::try_from).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self { letters, coefficient })
    }

    pub fn qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Image of basis state `x`: `P|x⟩ = phase |y⟩`.
    pub fn apply_to_basis(&self, x: usize) -> (usize, Complex64) {
        let n = self.letters.len();
        let mut y = x;
        let mut phase = self.coefficient;
        for (q, letter) in self.letters.iter().enumerate() {
            let shift = n - 1 - q;
            let bit = (x >> shift) & 1;
            match letter {
                Pauli::I => {}
                Pauli::X => y ^= 1 << shift,
                Pauli::Y => {
                    y ^= 1 << shift;
                    phase *= if bit == 0 { linalg::I } else { -linalg::I };
                }
                Pauli::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (y, phase)
    }

    pub fn to_matrix(&self) -> CMatrix {
        let dim = 1usize << self.letters.len();
        let mut m = CMatrix::zeros(dim, dim);
        self.add_to(&mut m);
        m
    }

    pub fn add_to(&self, m: &mut CMatrix) {
        for x in 0..m.ncols() {
            let (y, phase) = self.apply_to_basis(x);
            m[(y, x)] += phase;
        }
    }
}

/// Dense matrix of a sum of Pauli strings on `n` qubits.
pub fn pauli_sum(n: usize, terms: &[PauliString]) -> CMatrix {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for t in terms {
        debug_assert_eq!(t.qubits(), n);
        t.add_to(&mut m);
    }
    m
}

/// `Σ_i σ_a^{(i)}` for a single Pauli letter.
pub fn collective_pauli(n: usize, letter: Pauli) -> CMatrix {
    let terms: Vec<_> = (0..n).map(|q| PauliString::on_sites(n, &[(q, letter)], ONE)).collect();
    pauli_sum(n, &terms)
}

/// Diagonal of the open-chain controlled-phase product `Π_{i=1}^{n-1} CZ_{i,i+1}`.
pub fn path_graph_phases(n: usize) -> Vec<f64> {
    (0..1usize << n)
        .map(|x| {
            let pairs = (0..n.saturating_sub(1))
                .filter(|&q| linalg::qubit_bit(x, q, n) == 1 && linalg::qubit_bit(x, q + 1, n) == 1)
                .count();
            if pairs % 2 == 0 { 1.0 } else { -1.0 }
        })
        .collect()
}

pub fn build_hamiltonian(kind: HamiltonianKind, n: usize) -> Result<HermitianOperator> {
    if n < 2 {
        return Err(Error::SizeTooSmall { n, min: 2 });
    }
    let matrix = match kind {
        HamiltonianKind::Local => collective_pauli(n, Pauli::Z) * c(0.5, 0.0),
        HamiltonianKind::NearestNeighbor => {
            let terms: Vec<_> = (0..n - 1)
                .map(|q| PauliString::on_sites(n, &[(q, Pauli::Z), (q + 1, Pauli::Z)], ONE))
                .collect();
            pauli_sum(n, &terms)
        }
        HamiltonianKind::Cluster1d => {
            let v = path_graph_phases(n);
            let sx = collective_pauli(n, Pauli::X);
            CMatrix::from_fn(sx.nrows(), sx.ncols(), |i, j| sx[(i, j)] * (v[i] * v[j]))
        }
        HamiltonianKind::NonLocal => {
            if n % 2 == 1 {
                return Err(Error::OddSizeNonLocal(n));
            }
            let mut terms: Vec<_> = (0..n - 1)
                .map(|q| PauliString::on_sites(n, &[(q, Pauli::Y), (q + 1, Pauli::Y)], ONE))
                .collect();
            terms.push(PauliString::new(vec![Pauli::X; n], ONE));
            terms.push(PauliString::new(vec![Pauli::Z; n], ONE));
            pauli_sum(n, &terms)
        }
    };
    HermitianOperator::new(matrix)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

/// Eigenvalues grouped into levels (descending) with a canonical eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    levels: Vec<Level>,
    basis: CMatrix,
    gap: Option<f64>,
}

impl SpectralDecomposition {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.multiplicity).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.value).collect()
    }

    /// Columns are eigenvectors grouped by level, highest level first.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn gap(&self) -> Option<f64> {
        self.gap
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Column offset of each level in the basis, plus the total dimension at the end.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.levels.len() + 1);
        let mut acc = 0;
        out.push(0);
        for l in &self.levels {
            acc += l.multiplicity;
            out.push(acc);
        }
        out
    }

    /// Eigenvector `index` (0-based) of level `level` (0-based).
    pub fn vector(&self, level: usize, index: usize) -> CVector {
        let offset = self.offsets()[level];
        self.basis.column(offset + index).into_owned()
    }

    /// Records a verified gap; see [`check_homogeneous_gap`].
    pub fn with_gap(mut self, tol: f64) -> Result<Self> {
        self.gap = Some(check_homogeneous_gap(&self, tol)?);
        Ok(self)
    }

    /// Assembles a decomposition from levels and an orthonormal basis already in level order.
    pub fn from_parts(levels: Vec<Level>, basis: CMatrix) -> Result<Self> {
        let total: usize = levels.iter().map(|l| l.multiplicity).sum();
        if total != basis.ncols() || basis.nrows() != basis.ncols() {
            return Err(Error::DimensionMismatch { expected: basis.nrows(), actual: total });
        }
        Ok(Self { levels, basis, gap: None })
    }
}

/// Levels and canonical eigenbasis of `h`; `degeneracy_tol` is relative to the spectral radius.
pub fn spectral_decompose(h: &HermitianOperator, degeneracy_tol: f64) -> Result<SpectralDecomposition> {
    let deviation = linalg::hermitian_deviation(h.matrix());
    if deviation > HERMITIAN_TOL * h.spectral_radius_bound().max(1.0) {
        return Err(Error::NonHermitianInput { deviation });
    }
    let dim = h.dim();
    let (values, vectors) = linalg::hermitian_eigen(h.matrix());
    let radius = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let tol = degeneracy_tol * radius;

    let mut levels = Vec::new();
    let mut basis = CMatrix::zeros(dim, dim);
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && values[end - 1] - values[end] <= tol {
            end += 1;
        }
        let block = vectors.columns(start, end - start).into_owned();
        let canonical = canonical_level_basis(&block);
        basis.columns_mut(start, end - start).copy_from(&canonical);
        let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
        levels.push(Level { value: mean, multiplicity: end - start });
        start = end;
    }
    Ok(SpectralDecomposition { levels, basis, gap: None })
}

/// Deterministic orthonormal basis of the column span of `block`.
///
/// Row-reduces the span over computational indices (pivoting in index order), then
/// orthonormalises the reduced rows in pivot order and makes the first significant
/// component of each vector real and positive.
pub fn canonical_level_basis(block: &CMatrix) -> CMatrix {
    let dim = block.nrows();
    let m = block.ncols();
    let mut rows: Vec<Vec<Complex64>> = (0..m).map(|k| block.column(k).iter().copied().collect()).collect();
    let mut rank = 0;
    for col in 0..dim {
        if rank == m {
            break;
        }
        let (best, mag) = (rank..m)
            .map(|r| (r, rows[r][col].norm()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag < CANONICAL_ZERO {
            continue;
        }
        rows.swap(rank, best);
        let pivot = rows[rank][col];
        rows[rank].iter_mut().for_each(|z| *z /= pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank {
                continue;
            }
            let factor = row[col];
            if factor != ZERO {
                row.iter_mut().zip(&pivot_row).for_each(|(z, p)| *z -= factor * p);
            }
        }
        rank += 1;
    }

    let mut out: Vec<CVector> = Vec::with_capacity(m);
    for row in rows {
        let mut v = CVector::from_vec(row);
        // Two passes keep the result orthonormal to machine precision.
        for _ in 0..2 {
            for b in &out {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > 0.0 {
            v /= c(norm, 0.0);
        }
        linalg::fix_phase(&mut v, CANONICAL_ZERO);
        out.push(v);
    }
    CMatrix::from_columns(&out)
}

/// Common spacing `c > 0` of the levels; `tol` is relative to the spectral radius.
pub fn check_homogeneous_gap(spec: &SpectralDecomposition, tol: f64) -> Result<f64> {
    let values = spec.values();
    if values.len() < 2 {
        return Err(Error::TooFewLevels(values.len()));
    }
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let gaps: Vec<f64> = values.windows(2).map(|w| w[0] - w[1]).collect();
    let expected = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let worst = gaps
        .iter()
        .enumerate()
        .max_by(|a, b| (a.1 - expected).abs().total_cmp(&(b.1 - expected).abs()))
        .map(|(i, g)| (i, *g));
    if let Some((level, gap)) = worst {
        if (gap - expected).abs() > tol * scale {
            return Err(Error::InhomogeneousGap { level: level + 1, gap, expected });
        }
    }
    let mid = 0.5 * (values[0] + values[values.len() - 1]);
    let last = values.len() - 1;
    for k in 0..values.len() / 2 {
        let a = values[k] - mid;
        let b = values[last - k] - mid;
        if (a + b).abs() > tol * scale {
            return Err(Error::AsymmetricSpectrum { level: k + 1, mirror: last - k + 1, value: a, mirror_value: b });
        }
    }
    Ok(expected)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Levels `(n − 1 − 2x, 2·C(n−1, x))` of the open Ising chain.
pub fn nn_spectrum_formula(n: usize) -> Result<Vec<(f64, usize)>> {
    if n < 2 {
        return Err(Error::SizeTooSmall { n, min: 2 });
    }
    Ok((0..n).map(|x| ((n as f64) - 1.0 - 2.0 * x as f64, 2 * binomial(n - 1, x))).collect())
}
