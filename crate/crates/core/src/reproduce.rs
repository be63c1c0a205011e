//! Named end-to-end checks against the worked examples, with per-assertion status.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{self, ClosedFormParams, ClosedFormVariant};
use crate::channels::DephasingChannel;
use crate::error::{Error, Result};
use crate::experiments::{self, FrequencyScenario, SearchOptions};
use crate::fixtures::{self, Fixture};
use crate::linalg::{c, CVector};
use crate::operators::{self, build_hamiltonian, HamiltonianKind, DEFAULT_DEGENERACY_TOL};
use crate::qfi;
use crate::states::{self, DickeBasis, QuantumState, ReferenceKind};
use crate::su2::{self, Axis, SU2_TOL_PER_DIM};

pub const CASES: [&str; 5] = ["local-n5", "nn-n5", "nonlocal-n4", "bounds-local", "freq-nn"];

/// Entrywise tolerance for fixture comparisons.
pub const FIXTURE_TOL: f64 = 1e-9;
/// Relative agreement required between golden-section and the dense grid.
pub const GRID_REL_TOL: f64 = 1e-4;
/// Points in the dense time grid used to validate the golden-section optimum.
pub const DENSE_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|actual − expected| ≤ tolerance`.
    Equal,
    /// `actual ≥ expected − tolerance`.
    AtLeast,
    /// `actual > expected`.
    Exceeds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub relation: Relation,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Assertion {
    pub fn equal(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        let passed = (actual - expected).abs() <= tolerance;
        Self { name: name.into(), relation: Relation::Equal, expected, actual, tolerance, passed }
    }

    pub fn at_least(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        let passed = actual >= expected - tolerance;
        Self { name: name.into(), relation: Relation::AtLeast, expected, actual, tolerance, passed }
    }

    pub fn exceeds(name: impl Into<String>, expected: f64, actual: f64) -> Self {
        let passed = actual > expected;
        Self { name: name.into(), relation: Relation::Exceeds, expected, actual, tolerance: 0.0, passed }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let op = match self.relation {
            Relation::Equal => "==",
            Relation::AtLeast => ">=",
            Relation::Exceeds => ">",
        };
        write!(
            f,
            "{status} {}: actual {:.12e} {op} expected {:.12e} (tol {:.1e})",
            self.name, self.actual, self.expected, self.tolerance
        )
    }
}

/// Runs one named case. `seed` drives the random states and search restarts.
pub fn run_reproduce(case: &str, seed: u64) -> Result<Vec<Assertion>> {
    match case {
        "local-n5" => fixture_case(HamiltonianKind::Local),
        "nn-n5" => fixture_case(HamiltonianKind::NearestNeighbor),
        "nonlocal-n4" => fixture_case(HamiltonianKind::NonLocal),
        "bounds-local" => bounds_case(seed),
        "freq-nn" => frequency_case(4, seed),
        other => Err(Error::CaseUnknown(other.to_string())),
    }
}

fn fixture_case(kind: HamiltonianKind) -> Result<Vec<Assertion>> {
    let fx = fixtures::fixture(kind)?;
    let h = build_hamiltonian(kind, fx.n)?;
    let spec = operators::spectral_decompose(&h, DEFAULT_DEGENERACY_TOL)?;
    let gens = su2::generators_for_kind(kind, fx.n)?;
    let axis = Axis::from_number(fx.ladder_axis).ok_or(Error::CaseUnknown(format!("ladder axis {}", fx.ladder_axis)))?;
    let pg = states::pretty_good_state(&gens, axis, Some(fx.k))?;
    let mut out = Vec::new();

    // Local multiplicities are already pinned by the block shapes.
    if kind != HamiltonianKind::Local {
        out.push(Assertion::equal("spectrum levels and multiplicities", 0.0, spectrum_deviation(&spec, &fx), FIXTURE_TOL));
    }
    out.push(Assertion::equal("S3 ladder blocks", 0.0, block_deviation(&gens, &fx), FIXTURE_TOL));
    for (label, expected) in &fx.variances {
        let state = match label.as_str() {
            "pg" => pg.clone(),
            "ghz" => states::ghz_state(fx.n)?,
            "product" => states::product_plus(fx.n),
            "optimal" => states::reference_state(&ReferenceKind::Optimal { phase: 0.0 }, kind, &h)?,
            other => return Err(Error::CaseUnknown(format!("variance label {other}"))),
        };
        out.push(Assertion::equal(format!("variance({label})"), *expected, states::variance(&state, &h)?, FIXTURE_TOL));
    }
    let reference = Fixture::level_state(&spec, &fx.pg_level_amplitudes)?;
    let overlap = pg.overlap(&reference).ok_or(Error::MixedInput)?;
    out.push(Assertion::equal("pretty good state overlap", 1.0, overlap, FIXTURE_TOL));
    let report = su2::verify_su2(&gens, SU2_TOL_PER_DIM * gens.dim() as f64);
    out.push(Assertion::equal(
        "su(2) residuals",
        0.0,
        report.commutator_residual.max(report.casimir_residual),
        SU2_TOL_PER_DIM * gens.dim() as f64,
    ));
    Ok(out)
}

/// Sum of value and multiplicity mismatches; any multiplicity miss contributes at least 1.
/// Infinite when the level counts differ.
fn spectrum_deviation(spec: &operators::SpectralDecomposition, fx: &Fixture) -> f64 {
    let levels = spec.levels();
    if levels.len() != fx.spectrum.len() {
        return f64::INFINITY;
    }
    levels
        .iter()
        .zip(&fx.spectrum)
        .map(|(l, &(value, mult))| (l.value - value).abs() + l.multiplicity.abs_diff(mult) as f64)
        .sum()
}

/// Largest entrywise distance to the tabulated diagonal; infinite on a shape mismatch.
fn block_deviation(gens: &su2::Su2Generators, fx: &Fixture) -> f64 {
    let mut worst = 0.0f64;
    for key in fx.s3_block_diagonals.keys() {
        let k: usize = key.parse().expect("numeric block key");
        let (Some(block), Some(shape), Some(diag)) = (gens.s3_block(k), fx.block_shape(k), fx.block_diagonal(k)) else {
            return f64::INFINITY;
        };
        if [block.nrows(), block.ncols()] != shape {
            return f64::INFINITY;
        }
        for i in 0..block.nrows() {
            for j in 0..block.ncols() {
                let target = if i == j { diag.get(i).copied().unwrap_or(0.0) } else { 0.0 };
                worst = worst.max((block[(i, j)] - c(target, 0.0)).norm());
            }
        }
    }
    worst
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Result<QuantumState> {
    QuantumState::normalized(CVector::from_fn(dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
}

fn bounds_case(seed: u64) -> Result<Vec<Assertion>> {
    let n = 4;
    let h = build_hamiltonian(HamiltonianKind::Local, n)?;
    let gens = su2::generators_for_kind(HamiltonianKind::Local, n)?;
    let probes = [
        states::product_plus(n),
        states::ghz_state(n)?,
        states::pretty_good_state(&gens, Axis::Two, Some(2))?,
        states::dicke_state(n, 2, DickeBasis::X)?,
    ];
    let mut out = Vec::new();

    let mut margin = f64::INFINITY;
    for p in [0.6, 0.8, 0.95] {
        let channel = DephasingChannel::new(n, p)?;
        for state in &probes {
            let cq = bounds::cq_min_dephasing(state, &h, &channel)?.cq;
            let exact = qfi::qfi_mixed_sld(state, &h, &channel, 0.0)?.value;
            margin = margin.min(cq - exact);
        }
    }
    out.push(Assertion::at_least("bound minus exact QFI", 0.0, margin, FIXTURE_TOL));

    let sz = bounds::collective_sz(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for p in [0.7, 0.9] {
        let channel = DephasingChannel::new(n, p)?;
        for _ in 0..3 {
            let state = random_state(&mut rng, 1 << n)?;
            let cq = bounds::cq_min_dephasing(&state, &sz, &channel)?.cq;
            let params = ClosedFormParams {
                n: n as f64,
                q2: channel.q2(),
                delta_h2: Some(states::variance(&state, &sz)?),
                ..Default::default()
            };
            worst = worst.max((cq - bounds::cq_closed_form(ClosedFormVariant::LocalGeneral, &params)?).abs());
        }
    }
    out.push(Assertion::equal("minimised bound vs local closed form", 0.0, worst, FIXTURE_TOL));

    let channel = DephasingChannel::new(n, 0.8)?;
    let ghz = &probes[1];
    let report = bounds::cq_min_dephasing(ghz, &h, &channel)?;
    let alpha = report.alpha_min.unwrap_or(0.0);
    let remixed = bounds::cq_from_kraus(ghz, &bounds::remixed_family(&h, &channel, alpha)?)?.cq;
    out.push(Assertion::equal("remixed Kraus bound at optimal mixing", report.cq, remixed, FIXTURE_TOL));
    let plain = bounds::cq_from_kraus(ghz, &bounds::unremixed_family(&h, &channel)?)?.cq;
    out.push(Assertion::equal("unremixed Kraus bound", 4.0 * states::variance(ghz, &h)?, plain, FIXTURE_TOL));

    let noiseless = ClosedFormParams { n: n as f64, q2: 0.0, ..Default::default() };
    out.push(Assertion::equal("GHZ closed form at zero noise", 64.0, bounds::cq_closed_form(ClosedFormVariant::LocalGhz, &noiseless)?, 1e-12));
    Ok(out)
}

/// Ising-chain frequency estimation at `γ = 1`: pretty good probes, the noiseless
/// optimum and the subspace search, each checked against a dense time grid.
pub fn frequency_case(n: usize, seed: u64) -> Result<Vec<Assertion>> {
    let kind = HamiltonianKind::NearestNeighbor;
    let gamma = 1.0;
    let setup = experiments::frequency_setup(kind, n)?;
    let h = build_hamiltonian(kind, n)?;
    let base = experiments::baseline(kind, n, gamma)?;
    let template = FrequencyScenario::with_hamiltonian(kind, h, gamma, states::product_plus(n))?;
    let mut out = Vec::new();
    let mut grid_worst = grid_gap(&template, base.f_over_t_max)?;

    let mut best_pg = 0.0f64;
    let mut warm = Vec::new();
    let basis = setup.subspace_basis()?;
    for k in 1..=n / 2 {
        let state = setup.pg_state(k)?;
        warm.push(experiments::real_coefficients(&basis, &state)?);
        let scenario = template.with_state(state)?;
        let result = experiments::scan(&scenario)?;
        let i_rel = result.i_rel.unwrap_or(f64::NAN);
        out.push(Assertion::exceeds(format!("n={n} I_rel(PG k={k})"), 1.0, i_rel));
        best_pg = best_pg.max(i_rel);
        grid_worst = grid_worst.max(grid_gap(&scenario, result.f_over_t_max)?);
    }

    let optimal = states::nn_balanced_optimal(n, 0.0)?;
    warm.push(experiments::real_coefficients(&basis, &optimal)?);
    let scenario = template.with_state(optimal)?;
    let result = experiments::scan(&scenario)?;
    let i_opt = result.i_rel.unwrap_or(f64::NAN);
    grid_worst = grid_worst.max(grid_gap(&scenario, result.f_over_t_max)?);
    out.push(Assertion::at_least(format!("n={n} I_rel(noiseless optimum) vs best PG"), best_pg, i_opt, 0.0));

    let options = SearchOptions { seed, warm_starts: warm, ..Default::default() };
    let found = experiments::optimize_state_in_subspace(&template, &basis, &options)?;
    out.push(Assertion::at_least(format!("n={n} I_rel(subspace search) vs both"), best_pg.max(i_opt), found.i_rel, 1e-12));
    let searched = template.with_state(experiments::combine(&basis, &found.coefficients)?)?;
    grid_worst = grid_worst.max(grid_gap(&searched, found.f_over_t_max)?);

    out.push(Assertion::equal(format!("n={n} golden section vs dense grid (relative)"), 0.0, grid_worst, GRID_REL_TOL));
    Ok(out)
}

/// Relative distance between a refined optimum and the dense-grid maximum.
fn grid_gap(scenario: &FrequencyScenario, refined: f64) -> Result<f64> {
    let dense = experiments::grid_max(scenario, DENSE_GRID_POINTS)?;
    Ok((refined - dense).abs() / dense)
}
