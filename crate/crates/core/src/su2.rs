//! Companion su(2) generators for homogeneously gapped Hamiltonians.
//!
//! Given `H` with equally spaced, mirror-symmetric levels, the construction
//! works in the ordered eigenbasis of `H`: `S3` only couples neighbouring levels
//! through diagonal blocks whose entries are square roots of partial eigenvalue
//! sums, `S2` carries the same blocks times `∓i`, and both are rotated back to
//! the computational basis at the end.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, I};
use crate::operators::{
    self, build_hamiltonian, check_homogeneous_gap, HamiltonianKind, HermitianOperator, Pauli, PauliString,
    SpectralDecomposition, DEFAULT_DEGENERACY_TOL,
};

/// Relative tolerance for gap and partial-sum checks during construction.
pub const CONSTRUCTION_TOL: f64 = 1e-9;

/// Commutator tolerance per unit dimension used when certifying generators.
pub const SU2_TOL_PER_DIM: f64 = 1e-9;

/// Axis of a generator, 1-based like `S1, S2, S3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    One,
    Two,
    Three,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::One => 0,
            Axis::Two => 1,
            Axis::Three => 2,
        }
    }

    pub fn from_number(k: usize) -> Option<Axis> {
        match k {
            1 => Some(Axis::One),
            2 => Some(Axis::Two),
            3 => Some(Axis::Three),
            _ => None,
        }
    }

    /// The two other axes in cyclic order `(l, m)`.
    pub fn cyclic_partners(self) -> (Axis, Axis) {
        match self {
            Axis::One => (Axis::Two, Axis::Three),
            Axis::Two => (Axis::Three, Axis::One),
            Axis::Three => (Axis::One, Axis::Two),
        }
    }
}

/// Generators `(S1, S2, S3)` with `[S_k, S_l] = i c ε_klm S_m`.
#[derive(Debug, Clone)]
pub struct Su2Generators {
    generators: [CMatrix; 3],
    c: f64,
    j_max: f64,
    offset: f64,
    spectrum: Option<SpectralDecomposition>,
}

impl Su2Generators {
    pub fn s1(&self) -> &CMatrix {
        &self.generators[0]
    }

    pub fn s2(&self) -> &CMatrix {
        &self.generators[1]
    }

    pub fn s3(&self) -> &CMatrix {
        &self.generators[2]
    }

    pub fn generator(&self, axis: Axis) -> &CMatrix {
        &self.generators[axis.index()]
    }

    pub fn operator(&self, axis: Axis) -> HermitianOperator {
        HermitianOperator::new(self.generator(axis).clone()).expect("generators are Hermitian")
    }

    pub fn structure_constant(&self) -> f64 {
        self.c
    }

    pub fn j_max(&self) -> f64 {
        self.j_max
    }

    /// Shift subtracted from `H` so that `S1` has a mirror-symmetric spectrum.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Ordered eigenbasis of `S1` used for the block construction, when there is one.
    pub fn spectrum(&self) -> Option<&SpectralDecomposition> {
        self.spectrum.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.generators[0].nrows()
    }

    /// Block of `S3` mapping level `k` to level `k + 1` (1-based) in the eigenbasis of `S1`.
    pub fn s3_block(&self, k: usize) -> Option<CMatrix> {
        let spec = self.spectrum.as_ref()?;
        if k == 0 || k >= spec.levels().len() {
            return None;
        }
        let offsets = spec.offsets();
        let rotated = spec.basis().adjoint() * self.s3() * spec.basis();
        let rows = offsets[k + 1] - offsets[k];
        let cols = offsets[k] - offsets[k - 1];
        Some(rotated.view((offsets[k], offsets[k - 1]), (rows, cols)).into_owned())
    }

    /// Checks an arbitrary Hermitian triple, estimating `c` from `tr(S1 [S2, S3]) = i c ‖S1‖²`.
    pub fn certify(s1: CMatrix, s2: CMatrix, s3: CMatrix) -> Result<Self> {
        let dim = s1.nrows();
        let tol = SU2_TOL_PER_DIM * dim as f64;
        for m in [&s1, &s2, &s3] {
            let deviation = linalg::hermitian_deviation(m);
            if deviation > tol {
                return Err(Error::NonHermitianInput { deviation });
            }
        }
        let norm_sq = s1.norm_squared();
        if norm_sq == 0.0 {
            return Err(Error::Su2ViolationDetected { residual: 0.0, tolerance: tol });
        }
        let ratio = linalg::trace_product(&s1, &linalg::commutator(&s2, &s3)) / (I * norm_sq);
        if ratio.im.abs() > tol || ratio.re <= 0.0 {
            return Err(Error::Su2ViolationDetected { residual: ratio.im.abs().max(-ratio.re), tolerance: tol });
        }
        let mut gens = Su2Generators { generators: [s1, s2, s3], c: ratio.re, j_max: 0.0, offset: 0.0, spectrum: None };
        let report = verify_su2(&gens, tol);
        if !report.within_tolerance {
            return Err(Error::Su2ViolationDetected { residual: report.commutator_residual.max(report.casimir_residual), tolerance: tol });
        }
        gens.j_max = report.j_max.unwrap_or(0.0);
        Ok(gens)
    }

    /// Wraps matrices without any checks; intended for verification of foreign triples.
    pub fn from_parts_unchecked(s1: CMatrix, s2: CMatrix, s3: CMatrix, c: f64) -> Self {
        Su2Generators { generators: [s1, s2, s3], c, j_max: 0.0, offset: 0.0, spectrum: None }
    }
}

/// Outcome of [`check_multiplicity_conditions`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityReport {
    pub violations: Vec<MultiplicityViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityViolation {
    /// 1-based level index.
    pub level: usize,
    pub reason: String,
}

impl MultiplicityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Multiplicities must grow towards the centre (`d_{k+1} ≥ d_k` for `k ≤ ⌊n/2⌋`) and be mirror symmetric.
pub fn check_multiplicity_conditions(spec: &SpectralDecomposition) -> MultiplicityReport {
    let d = spec.multiplicities();
    let n = d.len();
    let mut violations = Vec::new();
    for k in 1..=n / 2 {
        if d[k] < d[k - 1] {
            violations.push(MultiplicityViolation {
                level: k,
                reason: format!("d_{} = {} < d_{} = {}", k + 1, d[k], k, d[k - 1]),
            });
        }
    }
    for k in 1..=n / 2 {
        let mirror = n + 1 - k;
        if d[k - 1] != d[mirror - 1] {
            violations.push(MultiplicityViolation {
                level: k,
                reason: format!("d_{} = {} differs from d_{} = {}", k, d[k - 1], mirror, d[mirror - 1]),
            });
        }
    }
    MultiplicityReport { violations }
}

/// Diagonal of the `S3` block between 0-based levels `k` and `k + 1`.
fn block_diagonal(values: &[f64], d: &[usize], c_gap: f64, k: usize, tol: f64) -> Result<Vec<f64>> {
    let length = d[k].min(d[k + 1]);
    let mut entries = Vec::with_capacity(length);
    'groups: for j in 0..=k {
        let count = if j == 0 { d[0] } else { d[j].saturating_sub(d[j - 1]) };
        let partial: f64 = values[j..=k].iter().sum();
        for _ in 0..count {
            if entries.len() == length {
                break 'groups;
            }
            if partial < -tol {
                return Err(Error::NegativePartialSum { level: k + 1, value: partial });
            }
            entries.push((0.5 * c_gap * partial.max(0.0)).sqrt());
        }
    }
    Ok(entries)
}

/// Builds `S2`, `S3` completing `S1 = H − offset` into su(2).
pub fn construct_generators(spec: &SpectralDecomposition) -> Result<Su2Generators> {
    let c_gap = match spec.gap() {
        Some(g) => g,
        None => check_homogeneous_gap(spec, CONSTRUCTION_TOL)?,
    };
    let report = check_multiplicity_conditions(spec);
    if let Some(v) = report.violations.first() {
        return Err(Error::ConditionViolation { level: v.level, reason: v.reason.clone() });
    }
    let raw = spec.values();
    let offset = 0.5 * (raw[0] + raw[raw.len() - 1]);
    let values: Vec<f64> = raw.iter().map(|v| v - offset).collect();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let d = spec.multiplicities();
    let offsets = spec.offsets();
    let dim = spec.dim();

    let mut s3_eig = CMatrix::zeros(dim, dim);
    let mut s2_eig = CMatrix::zeros(dim, dim);
    for k in 0..values.len() - 1 {
        let diagonal = block_diagonal(&values, &d, c_gap, k, CONSTRUCTION_TOL * scale)?;
        for (i, &e) in diagonal.iter().enumerate() {
            let upper = offsets[k] + i;
            let lower = offsets[k + 1] + i;
            s3_eig[(lower, upper)] = c(e, 0.0);
            s3_eig[(upper, lower)] = c(e, 0.0);
            s2_eig[(lower, upper)] = c(0.0, -e);
            s2_eig[(upper, lower)] = c(0.0, e);
        }
    }
    let b = spec.basis();
    let to_computational = |m: &CMatrix| b * m * b.adjoint();
    let s1_eig = CMatrix::from_diagonal(&CVector::from_iterator(
        dim,
        values.iter().zip(&d).flat_map(|(&v, &m)| std::iter::repeat(c(v, 0.0)).take(m)),
    ));
    let mut gens = Su2Generators {
        generators: [to_computational(&s1_eig), to_computational(&s2_eig), to_computational(&s3_eig)],
        c: c_gap,
        j_max: 0.0,
        offset,
        spectrum: Some(spec.clone()),
    };
    symmetrize(&mut gens.generators);
    let tol = SU2_TOL_PER_DIM * dim as f64;
    let check = verify_su2(&gens, tol);
    if !check.within_tolerance {
        return Err(Error::Su2ViolationDetected {
            residual: check.commutator_residual.max(check.casimir_residual),
            tolerance: tol,
        });
    }
    gens.j_max = check.j_max.unwrap_or(0.0);
    Ok(gens)
}

/// Convenience: decompose `h` and build its generators.
pub fn generators_for(h: &HermitianOperator) -> Result<Su2Generators> {
    let spec = operators::spectral_decompose(h, DEFAULT_DEGENERACY_TOL)?.with_gap(CONSTRUCTION_TOL)?;
    construct_generators(&spec)
}

pub fn generators_for_kind(kind: HamiltonianKind, n: usize) -> Result<Su2Generators> {
    generators_for(&build_hamiltonian(kind, n)?)
}

fn symmetrize(ms: &mut [CMatrix; 3]) {
    for m in ms.iter_mut() {
        let h = (&*m + m.adjoint()) * c(0.5, 0.0);
        *m = h;
    }
}

/// Direct sum of per-block generators sharing one structure constant.
pub fn construct_generators_blockdiag(blocks: &[SpectralDecomposition]) -> Result<Su2Generators> {
    let parts = blocks.iter().map(construct_generators).collect::<Result<Vec<_>>>()?;
    let Some(first) = parts.first() else {
        return Err(Error::TooFewLevels(0));
    };
    if parts.len() == 1 {
        return Ok(first.clone());
    }
    let c0 = first.c;
    for p in &parts[1..] {
        if (p.c - c0).abs() > CONSTRUCTION_TOL * c0.abs().max(1.0) {
            return Err(Error::MixedStructureConstants { first: c0, other: p.c });
        }
    }
    let dim: usize = parts.iter().map(|p| p.dim()).sum();
    let mut generators = [CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim)];
    let mut at = 0;
    for p in &parts {
        let d = p.dim();
        for (target, source) in generators.iter_mut().zip(&p.generators) {
            target.view_mut((at, at), (d, d)).copy_from(source);
        }
        at += d;
    }
    let mut gens = Su2Generators { generators, c: c0, j_max: 0.0, offset: 0.0, spectrum: None };
    let report = verify_su2(&gens, SU2_TOL_PER_DIM * dim as f64);
    gens.j_max = report.j_max.unwrap_or(0.0);
    Ok(gens)
}

/// `J_±` for one axis; `raise` lifts the axis eigenvalue by `c`.
#[derive(Debug, Clone)]
pub struct LadderPair {
    pub raise: CMatrix,
    pub lower: CMatrix,
    pub axis: Axis,
    pub c: f64,
}

/// `J^{(k)}_± = (S_l ± i S_m)/√2` with `(k, l, m)` cyclic.
pub fn ladder_pair(gens: &Su2Generators, axis: Axis) -> LadderPair {
    let (l, m) = axis.cyclic_partners();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let raise = (gens.generator(l) + gens.generator(m) * I) * c(s, 0.0);
    let lower = raise.adjoint();
    LadderPair { raise, lower, axis, c: gens.c }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Su2Report {
    /// Largest Frobenius norm of `[S_k, S_l] − i c ε_klm S_m`.
    pub commutator_residual: f64,
    /// Largest Frobenius norm of `[J², S_k]`.
    pub casimir_residual: f64,
    /// `None` when `J²` vanishes or `c = 0`.
    pub j_max: Option<f64>,
    pub within_tolerance: bool,
}

pub fn casimir(gens: &Su2Generators) -> CMatrix {
    gens.s1() * gens.s1() + gens.s2() * gens.s2() + gens.s3() * gens.s3()
}

/// `j` from the largest Casimir eigenvalue `μ = c² j (j + 1)`.
pub fn j_from_casimir(mu: f64, c_gap: f64) -> f64 {
    let disc = (1.0 + 4.0 * mu / (c_gap * c_gap)).max(0.0);
    0.5 * (disc.sqrt() - 1.0)
}

pub fn verify_su2(gens: &Su2Generators, tol: f64) -> Su2Report {
    let ic = I * gens.c;
    let [s1, s2, s3] = &gens.generators;
    let residuals = [
        (linalg::commutator(s1, s2) - s3 * ic).norm(),
        (linalg::commutator(s2, s3) - s1 * ic).norm(),
        (linalg::commutator(s3, s1) - s2 * ic).norm(),
    ];
    let commutator_residual = residuals.into_iter().fold(0.0, f64::max);
    let j2 = casimir(gens);
    let casimir_residual = gens
        .generators
        .iter()
        .map(|s| linalg::commutator(&j2, s).norm())
        .fold(0.0, f64::max);
    let mu = linalg::hermitian_eigenvalues(&((&j2 + j2.adjoint()) * c(0.5, 0.0)))
        .first()
        .copied()
        .unwrap_or(0.0);
    let j_max = if gens.c > 0.0 && mu > 1e-12 { Some(j_from_casimir(mu, gens.c)) } else { None };
    Su2Report {
        commutator_residual,
        casimir_residual,
        j_max,
        within_tolerance: commutator_residual < tol && casimir_residual < tol,
    }
}

/// Matrices of the fixed-form companions of the Ising chain:
/// `S2 = Σ_{j<n} σx^{⊗(j−1)} σy σz` and `S3 = −Σ_{j<n} σx^{⊗j}`.
pub fn nn_alternative_matrices(n: usize) -> Result<[CMatrix; 3]> {
    let s1 = build_hamiltonian(HamiltonianKind::NearestNeighbor, n)?.into_matrix();
    let one = c(1.0, 0.0);
    let s2_terms: Vec<PauliString> = (0..n - 1)
        .map(|j| {
            let mut sites: Vec<(usize, Pauli)> = (0..j).map(|q| (q, Pauli::X)).collect();
            sites.push((j, Pauli::Y));
            sites.push((j + 1, Pauli::Z));
            PauliString::on_sites(n, &sites, one)
        })
        .collect();
    let s3_terms: Vec<PauliString> = (0..n - 1)
        .map(|j| {
            let sites: Vec<(usize, Pauli)> = (0..=j).map(|q| (q, Pauli::X)).collect();
            PauliString::on_sites(n, &sites, -one)
        })
        .collect();
    Ok([s1, operators::pauli_sum(n, &s2_terms), operators::pauli_sum(n, &s3_terms)])
}

/// Fixed-form su(2) companions of the Ising chain, certified numerically.
pub fn nn_alternative_generators(n: usize) -> Result<Su2Generators> {
    let [s1, s2, s3] = nn_alternative_matrices(n)?;
    Su2Generators::certify(s1, s2, s3)
}

/// Collective spin `(Σσz, Σσx, Σσy)/2`, the textbook completion of the local Hamiltonian.
pub fn collective_spin_generators(n: usize) -> Result<Su2Generators> {
    if n < 1 {
        return Err(Error::SizeTooSmall { n, min: 1 });
    }
    let half = c(0.5, 0.0);
    let jz = operators::collective_pauli(n, Pauli::Z) * half;
    let jx = operators::collective_pauli(n, Pauli::X) * half;
    let jy = operators::collective_pauli(n, Pauli::Y) * half;
    Su2Generators::certify(jz, jx, jy)
}

/// Rotates `(S2, S3)` by the angle whose cosine and sine are `(alpha, beta)`.
pub fn rotate_companions(gens: &Su2Generators, alpha: f64, beta: f64) -> Su2Generators {
    let w2 = gens.s2() * c(alpha, 0.0) + gens.s3() * c(beta, 0.0);
    let w3 = gens.s2() * c(-beta, 0.0) + gens.s3() * c(alpha, 0.0);
    Su2Generators {
        generators: [gens.s1().clone(), w2, w3],
        c: gens.c,
        j_max: gens.j_max,
        offset: gens.offset,
        spectrum: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{spectral_decompose, HermitianOperator};

    fn spec_of(diagonal: &[f64]) -> SpectralDecomposition {
        let h = HermitianOperator::from_real_diagonal(diagonal).unwrap();
        spectral_decompose(&h, DEFAULT_DEGENERACY_TOL).unwrap()
    }

    #[test]
    fn multiplicity_violation_names_level() {
        let spec = SpectralDecomposition::from_parts(
            vec![
                operators::Level { value: 3.0, multiplicity: 2 },
                operators::Level { value: 1.0, multiplicity: 1 },
                operators::Level { value: -1.0, multiplicity: 1 },
                operators::Level { value: -3.0, multiplicity: 2 },
            ],
            CMatrix::identity(6, 6),
        )
        .unwrap();
        let report = check_multiplicity_conditions(&spec);
        assert!(!report.is_ok());
        assert_eq!(report.violations[0].level, 1);
    }

    #[test]
    fn single_qubit_completion_is_pauli_algebra() {
        let spec = spec_of(&[1.0, -1.0]);
        let gens = construct_generators(&spec).unwrap();
        assert!((gens.structure_constant() - 2.0).abs() < 1e-12);
        assert!((gens.j_max() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mixed_constants_rejected() {
        let a = spec_of(&[0.5, -0.5]);
        let b = spec_of(&[1.0, -1.0]);
        assert!(matches!(
            construct_generators_blockdiag(&[a, b]),
            Err(Error::MixedStructureConstants { .. })
        ));
    }

    #[test]
    fn zero_triple_has_no_j() {
        let z = CMatrix::zeros(2, 2);
        let gens = Su2Generators::from_parts_unchecked(z.clone(), z.clone(), z, 0.0);
        let report = verify_su2(&gens, 1e-9);
        assert_eq!(report.commutator_residual, 0.0);
        assert_eq!(report.j_max, None);
    }

    #[test]
    fn ladder_on_pauli_generators() {
        let x = PauliString::parse("X", c(1.0, 0.0)).unwrap().to_matrix();
        let y = PauliString::parse("Y", c(1.0, 0.0)).unwrap().to_matrix();
        let z = PauliString::parse("Z", c(1.0, 0.0)).unwrap().to_matrix();
        let gens = Su2Generators::certify(x, y, z).unwrap();
        assert!((gens.structure_constant() - 2.0).abs() < 1e-12);
        let pair = ladder_pair(&gens, Axis::Three);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pair.raise[(0, 1)] - c(2.0 * s, 0.0)).norm() < 1e-12);
        assert_eq!(pair.raise[(1, 0)], linalg::ZERO);
    }
}
