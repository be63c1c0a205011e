//! Reference data for the three worked examples, embedded at build time.
//!
//! Amplitudes are given per spectral level of `H`, on the first canonical
//! eigenvector of each level (see [`crate::operators::canonical_level_basis`]).

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{c, CVector};
use crate::operators::{HamiltonianKind, SpectralDecomposition};
use crate::states::QuantumState;

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Fixture {
    pub hamiltonian: String,
    pub n: usize,
    pub ladder_axis: usize,
    pub k: usize,
    pub structure_constant: f64,
    pub j_max: f64,
    /// `(λ, multiplicity)`, descending.
    pub spectrum: Vec<(f64, usize)>,
    /// Diagonal of `S3^{(k,k+1)}`, keyed by the 1-based `k`.
    pub s3_block_diagonals: BTreeMap<String, Vec<f64>>,
    /// `[rows, cols]` of each listed block.
    pub s3_block_shapes: BTreeMap<String, [usize; 2]>,
    pub ground_level_amplitudes: Vec<[f64; 2]>,
    pub pg_level_amplitudes: Vec<[f64; 2]>,
    pub variances: BTreeMap<String, f64>,
}

const LOCAL_N5: &str = include_str!("../fixtures/local_n5.json");
const NN_N5: &str = include_str!("../fixtures/nn_n5.json");
const NONLOCAL_N4: &str = include_str!("../fixtures/nonlocal_n4.json");

/// Fixture for `local` N=5, `nn` N=5 or `nonlocal` N=4.
pub fn fixture(kind: HamiltonianKind) -> Result<Fixture> {
    let text = match kind {
        HamiltonianKind::Local => LOCAL_N5,
        HamiltonianKind::NearestNeighbor => NN_N5,
        HamiltonianKind::NonLocal => NONLOCAL_N4,
        HamiltonianKind::Cluster1d => return Err(Error::CaseUnknown("cluster fixture".into())),
    };
    Ok(serde_json::from_str(text).expect("embedded fixture is valid JSON"))
}

impl Fixture {
    pub fn kind(&self) -> HamiltonianKind {
        self.hamiltonian.parse().expect("fixture names a known Hamiltonian")
    }

    /// `Σ_k a_k |λ_k, first⟩` for per-level amplitudes `a_k`.
    pub fn level_state(spec: &SpectralDecomposition, amplitudes: &[[f64; 2]]) -> Result<QuantumState> {
        if amplitudes.len() != spec.levels().len() {
            return Err(Error::DimensionMismatch { expected: spec.levels().len(), actual: amplitudes.len() });
        }
        let mut v = CVector::zeros(spec.dim());
        for (level, a) in amplitudes.iter().enumerate() {
            v += spec.vector(level, 0) * c(a[0], a[1]);
        }
        QuantumState::normalized(v)
    }

    pub fn block_shape(&self, k: usize) -> Option<[usize; 2]> {
        self.s3_block_shapes.get(&k.to_string()).copied()
    }

    pub fn block_diagonal(&self, k: usize) -> Option<&[f64]> {
        self.s3_block_diagonals.get(&k.to_string()).map(Vec::as_slice)
    }
}
