//! Purification-based upper bounds on the QFI under local dephasing.
//!
//! A Kraus family `{K_m(θ)}` of the dephased signal gives
//! `C_Q = 4(⟨A_1⟩ − ⟨A_2⟩²)` with `A_1 = Σ dK_m†dK_m`, `A_2 = i Σ dK_m† K_m`.
//! The remixed family `Π_n(θ) = Σ_m [e^{iαθB}]_{nm} U(θ) S_m` with
//! `B = Σ_i σx^{(i)}` acting on the Kraus labels is minimised over `α` in closed form.

use std::f64::consts::E;
use std::str::FromStr;

use serde::Serialize;

use crate::channels::{dephasing_kraus, DephasingChannel, KrausOperator, KrausSet};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, I};
use crate::operators::{collective_pauli, HermitianOperator, Pauli};
use crate::states::{self, QuantumState};

/// Largest register for which Kraus families are materialised densely.
pub const MAX_DENSE_KRAUS_QUBITS: usize = 6;

/// Below this `Ω` the remixing term carries no information and `α` is left unset.
const OMEGA_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub cq: f64,
    pub alpha_min: Option<f64>,
    pub xi: Option<f64>,
    pub omega: Option<f64>,
    pub q2: Option<f64>,
    pub variant: String,
}

/// Remixing generator acting on the Kraus labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemixGenerator {
    /// `Σ_i σx^{(i)}` on the label bits.
    CollectiveSx,
    /// The third generator of a constructed su(2) completion; exploratory, not evaluated in closed form.
    ConstructedS3,
}

impl FromStr for RemixGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sx" | "collective-sx" => Ok(RemixGenerator::CollectiveSx),
            "s3" => Ok(RemixGenerator::ConstructedS3),
            other => Err(Error::UnsupportedRemixGenerator(other.to_string())),
        }
    }
}

/// Kraus operators at `θ = 0` together with their `θ`-derivatives.
#[derive(Debug, Clone)]
pub struct KrausFamily {
    kraus: KrausSet,
    derivatives: Vec<CMatrix>,
}

impl KrausFamily {
    pub fn new(kraus: KrausSet, derivatives: Vec<CMatrix>) -> Result<Self> {
        if derivatives.len() != kraus.len() {
            return Err(Error::DimensionMismatch { expected: kraus.len(), actual: derivatives.len() });
        }
        if let Some(d) = derivatives.iter().find(|d| d.nrows() != kraus.dim() || d.ncols() != kraus.dim()) {
            return Err(Error::DimensionMismatch { expected: kraus.dim(), actual: d.nrows() });
        }
        Ok(Self { kraus, derivatives })
    }

    pub fn kraus(&self) -> &KrausSet {
        &self.kraus
    }

    pub fn derivatives(&self) -> &[CMatrix] {
        &self.derivatives
    }
}

fn check_dense_size(n: usize) -> Result<()> {
    if n > MAX_DENSE_KRAUS_QUBITS {
        return Err(Error::SizeTooLargeForExplicitKraus { n, max: MAX_DENSE_KRAUS_QUBITS });
    }
    Ok(())
}

/// `K_m(θ) = U(θ) S_m` with `dK_m/dθ = iH S_m` at `θ = 0`.
pub fn unremixed_family(h: &HermitianOperator, channel: &DephasingChannel) -> Result<KrausFamily> {
    check_dense_size(channel.qubits())?;
    let kraus = dephasing_kraus(channel)?;
    if kraus.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), actual: kraus.dim() });
    }
    let derivatives = kraus.operators().iter().map(|k| h.matrix() * k.to_dense() * I).collect();
    KrausFamily::new(kraus, derivatives)
}

/// `Π_n(θ)` remixed by `e^{iαθB}`, `B = Σ_i σx^{(i)}` on labels; at `θ = 0`,
/// `dΠ_n/dθ = iα Σ_i S_{n ⊕ e_i} + iH S_n`.
pub fn remixed_family(h: &HermitianOperator, channel: &DephasingChannel, alpha: f64) -> Result<KrausFamily> {
    let n = channel.qubits();
    check_dense_size(n)?;
    let kraus = dephasing_kraus(channel)?;
    if kraus.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), actual: kraus.dim() });
    }
    let dense: Vec<CMatrix> = kraus.operators().iter().map(KrausOperator::to_dense).collect();
    let derivatives = kraus
        .labels()
        .iter()
        .map(|&label| {
            let mut mixed = CMatrix::zeros(h.dim(), h.dim());
            for bit in 0..n {
                mixed += &dense[label ^ (1 << bit)];
            }
            (mixed * c(alpha, 0.0) + h.matrix() * &dense[label]) * I
        })
        .collect();
    KrausFamily::new(kraus, derivatives)
}

/// `4(⟨A_1⟩ − ⟨A_2⟩²)`.
pub fn cq_from_kraus(state: &QuantumState, family: &KrausFamily) -> Result<BoundReport> {
    let psi = state.vector().ok_or(Error::MixedInput)?;
    let deviation = family.kraus.completeness_deviation();
    if deviation > 1e-10 {
        return Err(Error::IncompleteKrausSet { deviation });
    }
    if psi.len() != family.kraus.dim() {
        return Err(Error::DimensionMismatch { expected: family.kraus.dim(), actual: psi.len() });
    }
    let mut a1 = 0.0;
    let mut a2 = c(0.0, 0.0);
    for (k, dk) in family.kraus.operators().iter().zip(&family.derivatives) {
        let kpsi = k.apply(psi);
        let dkpsi: CVector = dk * psi;
        a1 += dkpsi.norm_squared();
        a2 += I * dkpsi.dotc(&kpsi);
    }
    Ok(BoundReport {
        cq: (4.0 * (a1 - a2.re * a2.re)).max(0.0),
        alpha_min: None,
        xi: None,
        omega: None,
        q2: None,
        variant: "kraus".into(),
    })
}

/// `(Ξ, Ω)` for the remixing generator, with `S_z = Σ_i σz^{(i)}`:
/// `Ξ = 2√(p(1−p)) (½⟨{H, S_z}⟩ − ⟨H⟩⟨S_z⟩)`, `Ω = N(1 − q²) + q² ΔS_z²`.
pub fn xi_omega(state: &QuantumState, h: &HermitianOperator, channel: &DephasingChannel, generator: RemixGenerator) -> Result<(f64, f64)> {
    if generator != RemixGenerator::CollectiveSx {
        return Err(Error::UnsupportedRemixGenerator("s3".into()));
    }
    let psi = state.vector().ok_or(Error::MixedInput)?;
    if psi.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), actual: psi.len() });
    }
    let n = h.qubits();
    if channel.qubits() != n {
        return Err(Error::DimensionMismatch { expected: h.dim(), actual: 1 << channel.qubits() });
    }
    let sz: Vec<f64> = (0..psi.len()).map(|x| n as f64 - 2.0 * x.count_ones() as f64).collect();
    let szpsi = CVector::from_fn(psi.len(), |x, _| psi[x] * sz[x]);
    let hpsi = h.matrix() * psi;
    let mean_h = psi.dotc(&hpsi).re;
    let mean_sz = psi.dotc(&szpsi).re;
    let sym = szpsi.dotc(&hpsi).re;
    let var_sz = szpsi.norm_squared() - mean_sz * mean_sz;
    let p = channel.p();
    let q2 = channel.q2();
    let xi = 2.0 * (p * (1.0 - p)).sqrt() * (sym - mean_h * mean_sz);
    let omega = n as f64 * (1.0 - q2) + q2 * var_sz;
    Ok((xi, omega))
}

/// `4(ΔH² − Ξ²/Ω)` at `α_min = −Ξ/Ω`.
pub fn cq_min_dephasing(state: &QuantumState, h: &HermitianOperator, channel: &DephasingChannel) -> Result<BoundReport> {
    let (xi, omega) = xi_omega(state, h, channel, RemixGenerator::CollectiveSx)?;
    let var = states::variance(state, h)?;
    let (cq, alpha_min) = if omega > OMEGA_FLOOR {
        (4.0 * (var - xi * xi / omega), Some(-xi / omega))
    } else {
        (4.0 * var, None)
    };
    Ok(BoundReport {
        cq: cq.max(0.0),
        alpha_min,
        xi: Some(xi),
        omega: Some(omega),
        q2: Some(channel.q2()),
        variant: "min-dephasing".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormVariant {
    LocalGeneral,
    LocalPg,
    LocalGhz,
    NearestNeighbor,
}

impl ClosedFormVariant {
    pub fn label(self) -> &'static str {
        match self {
            ClosedFormVariant::LocalGeneral => "local-general",
            ClosedFormVariant::LocalPg => "local-pg",
            ClosedFormVariant::LocalGhz => "local-ghz",
            ClosedFormVariant::NearestNeighbor => "nn",
        }
    }
}

impl FromStr for ClosedFormVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "local-general" | "local_general" => Ok(ClosedFormVariant::LocalGeneral),
            "local-pg" | "local_pg" => Ok(ClosedFormVariant::LocalPg),
            "local-ghz" | "local_ghz" => Ok(ClosedFormVariant::LocalGhz),
            "nn" => Ok(ClosedFormVariant::NearestNeighbor),
            other => Err(format!("unknown bound variant '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClosedFormParams {
    pub n: f64,
    pub q2: f64,
    /// `ΔH²`; required by `local-general` and `nn`.
    pub delta_h2: Option<f64>,
    /// `⟨H S_z⟩ − ⟨H⟩⟨S_z⟩`; required by `nn`.
    pub covariance: Option<f64>,
    /// `ΔS_z²`; required by `nn`.
    pub delta_sz2: Option<f64>,
}

/// Closed-form minimised bounds for `H = S_z = Σ σz` signals and the Ising chain.
///
/// `local-general` is `4NΔH²(1 − q²)/(N(1 − q²) + q²ΔH²)`; `local-pg` and
/// `local-ghz` are that expression at the variance of the respective state.
pub fn cq_closed_form(variant: ClosedFormVariant, params: &ClosedFormParams) -> Result<f64> {
    let q2 = params.q2;
    if !(0.0..=1.0).contains(&q2) {
        return Err(Error::InvalidQ(q2));
    }
    let n = params.n;
    let keep = 1.0 - q2;
    let value = match variant {
        ClosedFormVariant::LocalGeneral => {
            let v = params.delta_h2.ok_or(Error::MissingParameter("delta_h2"))?;
            4.0 * n * v * keep / (n * keep + q2 * v)
        }
        // ΔH² of the pretty good and GHZ states measured for `S_z = Σ σz`: `N(N/2 + 1)` and `N²`.
        ClosedFormVariant::LocalPg => 4.0 * n * (n / 2.0 + 1.0) * keep / (keep + q2 * (n / 2.0 + 1.0)),
        ClosedFormVariant::LocalGhz => 4.0 * n * n * keep / (keep + q2 * n),
        ClosedFormVariant::NearestNeighbor => {
            let v = params.delta_h2.ok_or(Error::MissingParameter("delta_h2"))?;
            let cov = params.covariance.ok_or(Error::MissingParameter("covariance"))?;
            let vz = params.delta_sz2.ok_or(Error::MissingParameter("delta_sz2"))?;
            let denominator = n * keep + q2 * vz;
            if denominator > OMEGA_FLOOR {
                4.0 * (v - q2 * cov * cov / denominator)
            } else {
                4.0 * v
            }
        }
    };
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceBounds {
    pub ghz_bound: f64,
    pub sss_bound: f64,
}

/// Frequency-estimation variances `2γe/(NT)` (GHZ) and `2γ/(NT)` (spin squeezed).
pub fn reference_frequency_bounds(n: f64, total_time: f64, gamma: f64) -> ReferenceBounds {
    let sss = 2.0 * gamma / (n * total_time);
    ReferenceBounds { ghz_bound: E * sss, sss_bound: sss }
}

/// `S_z = Σ_i σz^{(i)}` as an operator.
pub fn collective_sz(n: usize) -> Result<HermitianOperator> {
    HermitianOperator::new(collective_pauli(n, Pauli::Z))
}
