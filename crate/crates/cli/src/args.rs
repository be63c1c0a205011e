use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use metrokit::bounds::ClosedFormVariant;
use metrokit::operators::HamiltonianKind;
use metrokit::states::DickeBasis;

#[derive(Debug, Parser)]
#[command(name = "metrokit", version, about = "su(2) probe states, dephased Fisher information and bounds for qubit Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format; CSV carries the flat result table only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for random restarts and random test states.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complete H into an su(2) triple and report spectrum, residuals and ladder blocks of S3.
    Algebra {
        #[command(flatten)]
        system: System,
        /// Emit the S3 block from level K to level K+1 (1-based).
        #[arg(long, value_name = "K")]
        block: Option<usize>,
    },
    /// Print the amplitudes of a probe state.
    State {
        #[command(flatten)]
        system: System,
        /// One of pg[:k=K][:axis=A], ghz, product, optimal, balanced, dicke:k=K[:basis=z|x].
        #[arg(long, default_value = "pg")]
        state: StateSpec,
    },
    /// Variance of H in a probe state.
    Variance {
        #[command(flatten)]
        system: System,
        /// One of pg[:k=K][:axis=A], ghz, product, optimal, balanced, dicke:k=K[:basis=z|x].
        #[arg(long, default_value = "pg")]
        state: StateSpec,
    },
    /// Phase QFI of a probe state, noiseless or after local z-dephasing.
    Qfi {
        #[command(flatten)]
        system: System,
        /// One of pg[:k=K][:axis=A], ghz, product, optimal, balanced, dicke:k=K[:basis=z|x].
        #[arg(long, default_value = "pg")]
        state: StateSpec,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Purification bound under dephasing: closed form with --variant, otherwise minimised for a state.
    Bound {
        /// Closed form to evaluate: local-general, local-pg, local-ghz or nn.
        #[arg(long)]
        variant: Option<ClosedFormVariant>,
        /// Hamiltonian for the state-specific bound; needed without --variant.
        #[arg(long, value_parser = parse_kind)]
        hamiltonian: Option<HamiltonianKind>,
        /// Number of qubits.
        #[arg(long)]
        n: usize,
        /// One of pg[:k=K][:axis=A], ghz, product, optimal, balanced, dicke:k=K[:basis=z|x].
        #[arg(long, default_value = "pg")]
        state: StateSpec,
        /// Noise strength q² = 4p(1 − p) for the closed forms.
        #[arg(long)]
        q2: Option<f64>,
        /// Variance of H, for local-general and nn.
        #[arg(long = "delta-h2")]
        delta_h2: Option<f64>,
        /// Covariance of H with Σσz, for nn.
        #[arg(long)]
        covariance: Option<f64>,
        /// Variance of Σσz, for nn.
        #[arg(long = "delta-sz2")]
        delta_sz2: Option<f64>,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Optimal interrogation time and improvement over |+⟩^⊗n for raised probe states.
    FreqScan {
        /// One of local, nn, cluster, nonlocal.
        #[arg(long, value_parser = parse_kind, default_value = "nn")]
        hamiltonian: HamiltonianKind,
        /// Number of qubits.
        #[arg(long)]
        n: usize,
        /// Scan every size from --n up to this one.
        #[arg(long = "n-max")]
        n_max: Option<usize>,
        /// Dephasing rate.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Also search the raising-ladder subspace for a better real superposition.
        #[arg(long)]
        search: bool,
        /// Seeded random starts for --search.
        #[arg(long, default_value_t = metrokit::experiments::DEFAULT_RESTARTS)]
        restarts: usize,
    },
    /// Run a named set of reference checks: local-n5, nn-n5, nonlocal-n4, bounds-local, freq-nn.
    Reproduce { case: String },
}

#[derive(Debug, Args)]
pub struct System {
    /// One of local, nn, cluster, nonlocal.
    #[arg(long, value_parser = parse_kind)]
    pub hamiltonian: HamiltonianKind,
    /// Number of qubits.
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Probability of no phase flip per qubit.
    #[arg(long, conflicts_with_all = ["gamma", "t"])]
    pub p: Option<f64>,
    /// Dephasing rate; needs --t.
    #[arg(long, requires = "t")]
    pub gamma: Option<f64>,
    /// Exposure time; needs --gamma.
    #[arg(long, requires = "gamma")]
    pub t: Option<f64>,
}

fn parse_kind(s: &str) -> Result<HamiltonianKind, String> {
    s.parse()
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// Raised extremal state; `axis` picks the companion generator.
    Pg { k: Option<usize>, axis: Option<usize> },
    Ghz,
    Product,
    Optimal,
    /// Flip-balanced optimum of the Ising chain; the plain optimum elsewhere.
    Balanced,
    Dicke { k: usize, basis: DickeBasis },
}

impl FromStr for StateSpec {
    type Err = String;

    /// `pg[:k=K][:axis=A]`, `ghz`, `product`, `optimal`, `balanced`, `dicke:k=K[:basis=z|x]`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let mut options = Vec::new();
        for part in parts {
            let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got '{part}'"))?;
            options.push((key, value));
        }
        let number = |key: &str| -> Result<Option<usize>, String> {
            options
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| v.parse::<usize>().map_err(|e| format!("{key}: {e}")))
                .transpose()
        };
        let allow = |keys: &[&str]| -> Result<(), String> {
            match options.iter().find(|(k, _)| !keys.contains(k)) {
                Some((k, _)) => Err(format!("option '{k}' does not apply to '{name}'")),
                None => Ok(()),
            }
        };
        match name {
            "pg" => {
                allow(&["k", "axis"])?;
                Ok(StateSpec::Pg { k: number("k")?, axis: number("axis")? })
            }
            "ghz" | "product" | "optimal" | "balanced" => {
                allow(&[])?;
                Ok(match name {
                    "ghz" => StateSpec::Ghz,
                    "product" => StateSpec::Product,
                    "optimal" => StateSpec::Optimal,
                    _ => StateSpec::Balanced,
                })
            }
            "dicke" => {
                allow(&["k", "basis"])?;
                let k = number("k")?.ok_or("dicke needs k=K")?;
                let basis = match options.iter().find(|(key, _)| *key == "basis") {
                    Some((_, v)) => v.parse().map_err(|e: metrokit::Error| e.to_string())?,
                    None => DickeBasis::Z,
                };
                Ok(StateSpec::Dicke { k, basis })
            }
            other => Err(format!("unknown state '{other}'")),
        }
    }
}

impl std::fmt::Display for StateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateSpec::Pg { k, axis } => {
                f.write_str("pg")?;
                if let Some(k) = k {
                    write!(f, ":k={k}")?;
                }
                if let Some(a) = axis {
                    write!(f, ":axis={a}")?;
                }
                Ok(())
            }
            StateSpec::Ghz => f.write_str("ghz"),
            StateSpec::Product => f.write_str("product"),
            StateSpec::Optimal => f.write_str("optimal"),
            StateSpec::Balanced => f.write_str("balanced"),
            StateSpec::Dicke { k, basis } => {
                let b = match basis {
                    DickeBasis::Z => "z",
                    DickeBasis::X => "x",
                };
                write!(f, "dicke:k={k}:basis={b}")
            }
        }
    }
}
