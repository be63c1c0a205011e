use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the non-local chain needs an even number of qubits, got {0}")]
    OddSizeNonLocal(usize),
    #[error("at least {min} qubits are required, got {n}")]
    SizeTooSmall { n: usize, min: usize },
    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NonHermitianInput { deviation: f64 },
    #[error("spectrum is not homogeneously gapped: gap between levels {level} and {next} is {gap}, expected {expected}", next = .level + 1)]
    InhomogeneousGap { level: usize, gap: f64, expected: f64 },
    #[error("spectrum is not symmetric about its midpoint: levels {level} and {mirror} give {value} and {mirror_value}")]
    AsymmetricSpectrum { level: usize, mirror: usize, value: f64, mirror_value: f64 },
    #[error("spectrum needs at least two levels, got {0}")]
    TooFewLevels(usize),
    #[error("multiplicity condition violated at level {level}: {reason}")]
    ConditionViolation { level: usize, reason: String },
    #[error("negative partial eigenvalue sum {value} in block ({level}, {next})", next = .level + 1)]
    NegativePartialSum { level: usize, value: f64 },
    #[error("blocks disagree on the structure constant ({first} vs {other})")]
    MixedStructureConstants { first: f64, other: f64 },
    #[error("su(2) relations fail: residual {residual:e} exceeds {tolerance:e}")]
    Su2ViolationDetected { residual: f64, tolerance: f64 },
    #[error("raising {k} times annihilates the state (norm {norm:e})")]
    AnnihilatedState { k: usize, norm: f64 },
    #[error("excitation number {k} outside 0..={max}")]
    KOutOfRange { k: f64, max: f64 },
    #[error("unknown basis label '{0}'")]
    UnknownBasis(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("explicit Kraus sets are limited to {max} qubits, got {n}")]
    SizeTooLargeForExplicitKraus { n: usize, max: usize },
    #[error("Kraus set is not trace preserving (deviation {deviation:e})")]
    IncompleteKrausSet { deviation: f64 },
    #[error("operation requires a pure state")]
    MixedInput,
    #[error("derivative of the state is not Hermitian (max deviation {deviation:e})")]
    NonHermitianDerivative { deviation: f64 },
    #[error("dephasing does not commute with the signal generator (residual {residual:e})")]
    NonCommutingNoise { residual: f64 },
    #[error("remixing generator '{0}' is not supported")]
    UnsupportedRemixGenerator(String),
    #[error("q² must lie in [0, 1], got {0}")]
    InvalidQ(f64),
    #[error("invalid channel parameter: {0}")]
    InvalidChannel(String),
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("QFI per unit time vanishes on the whole scan range")]
    FlatObjective,
    #[error("raising chain annihilates the starting state")]
    AnnihilatedAtStart,
    #[error("subspace basis needs at least {min} vectors, got {len}")]
    BasisTooSmall { len: usize, min: usize },
    #[error("unknown reproduction case '{0}'")]
    CaseUnknown(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("missing parameter '{0}'")]
    MissingParameter(&'static str),
}

impl Error {
    /// Stable machine-readable name used in structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OddSizeNonLocal(_) => "OddSizeNonLocal",
            Error::SizeTooSmall { .. } => "SizeTooSmall",
            Error::NonHermitianInput { .. } => "NonHermitianInput",
            Error::InhomogeneousGap { .. } => "InhomogeneousGap",
            Error::AsymmetricSpectrum { .. } => "AsymmetricSpectrum",
            Error::TooFewLevels(_) => "TooFewLevels",
            Error::ConditionViolation { .. } => "ConditionViolation",
            Error::NegativePartialSum { .. } => "NegativePartialSum",
            Error::MixedStructureConstants { .. } => "MixedStructureConstants",
            Error::Su2ViolationDetected { .. } => "Su2ViolationDetected",
            Error::AnnihilatedState { .. } => "AnnihilatedState",
            Error::KOutOfRange { .. } => "KOutOfRange",
            Error::UnknownBasis(_) => "UnknownBasis",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SizeTooLargeForExplicitKraus { .. } => "SizeTooLargeForExplicitKraus",
            Error::IncompleteKrausSet { .. } => "IncompleteKrausSet",
            Error::MixedInput => "MixedInput",
            Error::NonHermitianDerivative { .. } => "NonHermitianDerivative",
            Error::NonCommutingNoise { .. } => "NonCommutingNoise",
            Error::UnsupportedRemixGenerator(_) => "UnsupportedRemixGenerator",
            Error::InvalidQ(_) => "InvalidQ",
            Error::InvalidChannel(_) => "InvalidChannel",
            Error::NonPositiveTime(_) => "NonPositiveTime",
            Error::FlatObjective => "FlatObjective",
            Error::AnnihilatedAtStart => "AnnihilatedAtStart",
            Error::BasisTooSmall { .. } => "BasisTooSmall",
            Error::CaseUnknown(_) => "CaseUnknown",
            Error::InvalidState(_) => "InvalidState",
            Error::MissingParameter(_) => "MissingParameter",
        }
    }
}
