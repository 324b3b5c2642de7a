use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("register dimension {dim} exceeds the {max_qubits}-qubit limit")]
    TooLarge { dim: usize, max_qubits: usize },
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("basis is not orthonormal and complete")]
    NonOrthonormalBasis,
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("gate `{0}` does not take an angle")]
    UnexpectedAngle(String),
    #[error("gate `{0}` requires an angle")]
    MissingAngle(String),
    #[error("not a density operator: {0}")]
    InvalidDensity(String),
    #[error("degenerate measurement: total outcome probability {0}")]
    DegenerateMeasurement(f64),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("operator is not a dichotomic observable: {0}")]
    NotDichotomic(String),
    #[error("event at t={requested} precedes the register clock t={clock}")]
    TimeOrder { requested: u64, clock: u64 },
    #[error("mode {0} was already consumed")]
    ConsumedMode(String),
    #[error("mode {0} is not in the register")]
    UnknownMode(String),
    #[error("mode {0} already exists in the register")]
    DuplicateMode(String),
    #[error("a mode cannot be measured jointly with itself")]
    SelfMeasurement,
    #[error("register was invalidated by a failed fusion")]
    InvalidRegister,
    #[error("mode {0} lies in the past and no longer exists")]
    TemporalInaccessible(String),
    #[error("chain state does not match the stored record string")]
    DecodeMismatch,
    #[error("fusion failed {0} consecutive times")]
    FusionRetriesExhausted(u32),
    #[error("chain is invalid")]
    InvalidChain,
    #[error("valuation is missing entry for {0}")]
    MissingValuation(String),
    #[error("reconstruction is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::TooLarge { .. } => "TOO_LARGE",
            Error::NotNormalized(_) => "NOT_NORMALIZED",
            Error::NonOrthonormalBasis => "NON_ORTHONORMAL_BASIS",
            Error::UnknownGate(_) => "UNKNOWN_GATE",
            Error::UnexpectedAngle(_) => "UNEXPECTED_ANGLE",
            Error::MissingAngle(_) => "MISSING_ANGLE",
            Error::InvalidDensity(_) => "INVALID_DENSITY",
            Error::DegenerateMeasurement(_) => "DEGENERATE_MEASUREMENT",
            Error::InvalidDistribution(_) => "INVALID_DISTRIBUTION",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::NotDichotomic(_) => "NOT_DICHOTOMIC",
            Error::TimeOrder { .. } => "TIME_ORDER",
            Error::ConsumedMode(_) => "CONSUMED_MODE",
            Error::UnknownMode(_) => "UNKNOWN_MODE",
            Error::DuplicateMode(_) => "DUPLICATE_MODE",
            Error::SelfMeasurement => "SELF_MEASUREMENT",
            Error::InvalidRegister => "INVALID_REGISTER",
            Error::TemporalInaccessible(_) => "TEMPORAL_INACCESSIBLE",
            Error::DecodeMismatch => "DECODE_MISMATCH",
            Error::FusionRetriesExhausted(_) => "FUSION_RETRIES_EXHAUSTED",
            Error::InvalidChain => "INVALID_CHAIN",
            Error::MissingValuation(_) => "MISSING_VALUATION",
            Error::NotPsd(_) => "NOT_PSD",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
