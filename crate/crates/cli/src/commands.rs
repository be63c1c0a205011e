use metrokit::bounds::{self, ClosedFormParams};
use metrokit::channels::DephasingChannel;
use metrokit::experiments::{self, FrequencyScenario, SearchOptions};
use metrokit::io::{MatrixJson, ReportEnvelope, StateJson};
use metrokit::operators::{build_hamiltonian, HamiltonianKind, HermitianOperator};
use metrokit::reproduce;
use metrokit::states::{self, QuantumState, ReferenceKind};
use metrokit::su2::{self, Axis, SU2_TOL_PER_DIM};
use metrokit::{qfi, Error};
use serde_json::json;

use crate::args::{ChannelArgs, Command, StateSpec, System};
use crate::output::{Cell, Report, Table};

pub enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CaseUnknown(_) => Failure::Usage(e.to_string()),
            other => Failure::Compute(other),
        }
    }
}

/// A finished report and whether every check it carries passed.
pub struct Outcome {
    pub report: Report,
    pub success: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self { report, success: true }
    }
}

pub fn run(command: Command, seed: u64) -> Result<Outcome, Failure> {
    match command {
        Command::Algebra { system, block } => algebra(&system, block).map(Outcome::from),
        Command::State { system, state } => state_cmd(&system, &state).map(Outcome::from),
        Command::Variance { system, state } => variance(&system, &state).map(Outcome::from),
        Command::Qfi { system, state, channel } => qfi_cmd(&system, &state, &channel).map(Outcome::from),
        Command::Bound { variant, hamiltonian, n, state, q2, delta_h2, covariance, delta_sz2, channel } => {
            let channel = build_channel(&channel, n)?;
            match variant {
                Some(variant) => {
                    let q2 = match (q2, &channel) {
                        (Some(q), _) => q,
                        (None, Some(ch)) => ch.q2(),
                        (None, None) => return Err(Failure::Usage("closed-form bounds need --q2, --p or --gamma/--t".into())),
                    };
                    let params = ClosedFormParams { n: n as f64, q2, delta_h2, covariance, delta_sz2 };
                    let value = bounds::cq_closed_form(variant, &params)?;
                    let report = ReportEnvelope::new("bound")
                        .param("variant", variant.label())
                        .param("n", n)
                        .param("q2", q2)
                        .param("delta_h2", delta_h2)
                        .param("covariance", covariance)
                        .param("delta_sz2", delta_sz2)
                        .result("cq", value);
                    let table = Table::new(&["variant", "n", "q2", "cq"]).row(vec![variant.label().into(), n.into(), q2.into(), value.into()]);
                    Ok(Report::new(report, table).into())
                }
                None => {
                    let kind = hamiltonian.ok_or_else(|| Failure::Usage("state bounds need --hamiltonian (or pick a --variant)".into()))?;
                    let channel = channel.ok_or_else(|| Failure::Usage("state bounds need --p or --gamma/--t".into()))?;
                    state_bound(&System { hamiltonian: kind, n }, &state, &channel).map(Outcome::from)
                }
            }
        }
        Command::FreqScan { hamiltonian, n, n_max, gamma, search, restarts } => {
            freq_scan(hamiltonian, n, n_max.unwrap_or(n), gamma, search, restarts, seed).map(Outcome::from)
        }
        Command::Reproduce { case } => {
            let assertions = reproduce::run_reproduce(&case, seed)?;
            let success = assertions.iter().all(|a| a.passed);
            let mut table = Table::new(&["name", "relation", "expected", "actual", "tolerance", "passed"]);
            for a in &assertions {
                let relation = serde_json::to_value(a.relation).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                table = table.row(vec![a.name.clone().into(), relation.into(), a.expected.into(), a.actual.into(), a.tolerance.into(), a.passed.into()]);
            }
            let envelope = ReportEnvelope::new("reproduce")
                .param("case", &case)
                .param("seed", seed)
                .result("assertions", &assertions)
                .result("passed", success)
                .provenance(&case);
            Ok(Outcome { report: Report::new(envelope, table), success })
        }
    }
}

fn build_channel(args: &ChannelArgs, n: usize) -> Result<Option<DephasingChannel>, Failure> {
    match (args.p, args.gamma, args.t) {
        (Some(p), None, None) => Ok(Some(DephasingChannel::new(n, p)?)),
        (None, Some(gamma), Some(t)) => Ok(Some(DephasingChannel::from_rate(n, gamma, t)?)),
        (None, None, None) => Ok(None),
        _ => Err(Failure::Usage("give either --p or both --gamma and --t".into())),
    }
}

fn channel_params(mut envelope: ReportEnvelope, channel: &DephasingChannel) -> ReportEnvelope {
    if let Some((gamma, t)) = channel.rate_time() {
        envelope = envelope.param("gamma", gamma).param("t", t);
    }
    envelope.param("p", channel.p()).param("q2", channel.q2())
}

/// Default ladder: axis 2 for the local field, axis 3 elsewhere.
fn default_axis(kind: HamiltonianKind) -> Axis {
    if kind == HamiltonianKind::Local {
        Axis::Two
    } else {
        Axis::Three
    }
}

fn build_state(system: &System, spec: &StateSpec) -> Result<(HermitianOperator, QuantumState), Failure> {
    let h = build_hamiltonian(system.hamiltonian, system.n)?;
    let state = match spec {
        StateSpec::Pg { k, axis } => {
            let axis = match axis {
                Some(a) => Axis::from_number(*a).ok_or_else(|| Failure::Usage(format!("axis must be 1, 2 or 3, got {a}")))?,
                None => default_axis(system.hamiltonian),
            };
            let gens = su2::generators_for(&h)?;
            states::pretty_good_state(&gens, axis, *k)?
        }
        StateSpec::Ghz => states::reference_state(&ReferenceKind::Ghz, system.hamiltonian, &h)?,
        StateSpec::Product => states::reference_state(&ReferenceKind::ProductPlus, system.hamiltonian, &h)?,
        StateSpec::Optimal => states::reference_state(&ReferenceKind::Optimal { phase: 0.0 }, system.hamiltonian, &h)?,
        StateSpec::Balanced => states::reference_state(&ReferenceKind::BalancedOptimal { phase: 0.0 }, system.hamiltonian, &h)?,
        StateSpec::Dicke { k, basis } => {
            states::reference_state(&ReferenceKind::Dicke { excitations: *k, basis: *basis }, system.hamiltonian, &h)?
        }
    };
    Ok((h, state))
}

fn system_envelope(command: &str, system: &System) -> ReportEnvelope {
    ReportEnvelope::new(command).param("hamiltonian", system.hamiltonian.label()).param("n", system.n)
}

fn algebra(system: &System, block: Option<usize>) -> Result<Report, Failure> {
    let gens = su2::generators_for_kind(system.hamiltonian, system.n)?;
    let report = su2::verify_su2(&gens, SU2_TOL_PER_DIM * gens.dim() as f64);
    let spectrum: Vec<(f64, usize)> = gens
        .spectrum()
        .map(|s| s.levels().iter().map(|l| (l.value + gens.offset(), l.multiplicity)).collect())
        .unwrap_or_default();
    let mut envelope = system_envelope("algebra", system)
        .result("structure_constant", gens.structure_constant())
        .result("j_max", gens.j_max())
        .result("spectrum", &spectrum)
        .result("commutator_residual", report.commutator_residual)
        .result("casimir_residual", report.casimir_residual)
        .result("certified", report.within_tolerance);
    let table = match block {
        Some(k) => {
            let levels = spectrum.len();
            let m = gens.s3_block(k).ok_or_else(|| Failure::Usage(format!("block must lie in 1..={}, got {k}", levels.saturating_sub(1))))?;
            envelope = envelope.param("block", k).result("s3_block", MatrixJson::from_matrix(&m));
            let mut table = Table::new(&["row", "col", "re", "im"]);
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    table = table.row(vec![i.into(), j.into(), m[(i, j)].re.into(), m[(i, j)].im.into()]);
                }
            }
            table
        }
        None => {
            let mut table = Table::new(&["level", "value", "multiplicity"]);
            for (i, (value, mult)) in spectrum.iter().enumerate() {
                table = table.row(vec![(i + 1).into(), (*value).into(), (*mult).into()]);
            }
            table
        }
    };
    Ok(Report::new(envelope, table))
}

fn state_cmd(system: &System, spec: &StateSpec) -> Result<Report, Failure> {
    let (h, state) = build_state(system, spec)?;
    let json = StateJson::from_state(&state)?;
    let mut table = Table::new(&["index", "re", "im"]);
    for (i, a) in json.amplitudes.iter().enumerate() {
        table = table.row(vec![i.into(), a[0].into(), a[1].into()]);
    }
    let envelope = system_envelope("state", system)
        .param("state", spec.to_string())
        .result("state", &json)
        .result("variance", states::variance(&state, &h)?);
    Ok(Report::new(envelope, table))
}

fn variance(system: &System, spec: &StateSpec) -> Result<Report, Failure> {
    let (h, state) = build_state(system, spec)?;
    let v = states::variance(&state, &h)?;
    let envelope = system_envelope("variance", system).param("state", spec.to_string()).result("variance", v);
    let table = Table::new(&["hamiltonian", "n", "state", "variance"]).row(vec![
        system.hamiltonian.label().into(),
        system.n.into(),
        spec.to_string().into(),
        v.into(),
    ]);
    Ok(Report::new(envelope, table))
}

fn qfi_cmd(system: &System, spec: &StateSpec, channel: &ChannelArgs) -> Result<Report, Failure> {
    let (h, state) = build_state(system, spec)?;
    let mut envelope = system_envelope("qfi", system).param("state", spec.to_string());
    let result = match build_channel(channel, system.n)? {
        Some(ch) => {
            envelope = channel_params(envelope, &ch);
            qfi::qfi_dephased(&state, &h, &ch)?
        }
        None => qfi::qfi_pure(&state, &h)?,
    };
    let method = serde_json::to_value(result.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    envelope = envelope.result("qfi", result.value).result("method", &method);
    let table = Table::new(&["hamiltonian", "n", "state", "qfi", "method"]).row(vec![
        system.hamiltonian.label().into(),
        system.n.into(),
        spec.to_string().into(),
        result.value.into(),
        method.into(),
    ]);
    Ok(Report::new(envelope, table))
}

fn state_bound(system: &System, spec: &StateSpec, channel: &DephasingChannel) -> Result<Report, Failure> {
    let (h, state) = build_state(system, spec)?;
    let report = bounds::cq_min_dephasing(&state, &h, channel)?;
    let exact = qfi::qfi_dephased(&state, &h, channel)?.value;
    let envelope = channel_params(system_envelope("bound", system).param("state", spec.to_string()), channel)
        .result("cq", report.cq)
        .result("alpha_min", report.alpha_min)
        .result("xi", report.xi)
        .result("omega", report.omega)
        .result("qfi", exact);
    let table = Table::new(&["hamiltonian", "n", "state", "q2", "cq", "alpha_min", "qfi"]).row(vec![
        system.hamiltonian.label().into(),
        system.n.into(),
        spec.to_string().into(),
        channel.q2().into(),
        report.cq.into(),
        report.alpha_min.into(),
        exact.into(),
    ]);
    Ok(Report::new(envelope, table))
}

fn freq_scan(kind: HamiltonianKind, n_min: usize, n_max: usize, gamma: f64, search: bool, restarts: usize, seed: u64) -> Result<Report, Failure> {
    if n_max < n_min {
        return Err(Failure::Usage(format!("--n-max {n_max} is below --n {n_min}")));
    }
    let mut table = Table::new(&["n", "k", "t_opt", "f_over_t", "i_rel"]);
    let mut rows = Vec::new();
    let mut push = |table: Table, n: usize, k: String, t_opt: f64, f: f64, i_rel: f64| {
        rows.push(json!({ "n": n, "k": k, "t_opt": t_opt, "f_over_t": f, "i_rel": i_rel }));
        table.row(vec![n.into(), Cell::Text(k), t_opt.into(), f.into(), i_rel.into()])
    };
    let mut searches = Vec::new();
    for n in n_min..=n_max {
        let setup = experiments::frequency_setup(kind, n)?;
        let h = build_hamiltonian(kind, n)?;
        let template = FrequencyScenario::with_hamiltonian(kind, h.clone(), gamma, states::product_plus(n))?;
        let base = experiments::baseline(kind, n, gamma)?;
        table = push(table, n, "product".into(), base.t_opt, base.f_over_t_max, 1.0);
        let basis = if search { Some(setup.subspace_basis()?) } else { None };
        let mut warm = Vec::new();
        for k in 1..=(n / 2).min(setup.max_excitation()) {
            let state = setup.pg_state(k)?;
            if let Some(b) = &basis {
                warm.push(experiments::real_coefficients(b, &state)?);
            }
            let r = experiments::scan(&template.with_state(state)?)?;
            table = push(table, n, k.to_string(), r.t_opt, r.f_over_t_max, r.i_rel.unwrap_or(f64::NAN));
        }
        let optimal = states::reference_state(&ReferenceKind::BalancedOptimal { phase: 0.0 }, kind, &h)?;
        if let Some(b) = &basis {
            warm.push(experiments::real_coefficients(b, &optimal)?);
        }
        let r = experiments::scan(&template.with_state(optimal)?)?;
        table = push(table, n, "optimal".into(), r.t_opt, r.f_over_t_max, r.i_rel.unwrap_or(f64::NAN));
        if let Some(b) = &basis {
            let options = SearchOptions { seed, restarts, warm_starts: warm, ..Default::default() };
            let found = experiments::optimize_state_in_subspace(&template, b, &options)?;
            table = push(table, n, "search".into(), found.t_opt, found.f_over_t_max, found.i_rel);
            searches.push(json!({ "n": n, "coefficients": found.coefficients }));
        }
    }
    let mut envelope = ReportEnvelope::new("freq-scan")
        .param("hamiltonian", kind.label())
        .param("n", n_min)
        .param("n_max", n_max)
        .param("gamma", gamma)
        .param("search", search)
        .param("seed", seed)
        .result("rows", &rows);
    if search {
        envelope = envelope.param("restarts", restarts).result("search", &searches);
    }
    Ok(Report::new(envelope, table))
}
