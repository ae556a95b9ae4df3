use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid profile: strategy {index} out of range for player {player} ({count} strategies)")]
    InvalidProfile {
        player: usize,
        index: usize,
        count: usize,
    },
    #[error("invalid player index {0}; games have exactly 2 players")]
    InvalidPlayer(usize),
    #[error("strategy index {index} out of range (arity {arity})")]
    StrategyOutOfRange { index: usize, arity: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation requires a 2x2 game, got {rows}x{cols}")]
    NotTwoByTwo { rows: usize, cols: usize },
    #[error("degenerate state: all amplitudes are zero")]
    DegenerateState,
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("entanglement parameter {0} outside [0, pi/2]")]
    GammaOutOfRange(f64),
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("grid must have at least {min} steps, got {found}")]
    GridTooSmall { min: usize, found: usize },
    #[error("objective has {found} entries, game has {expected} cells")]
    ObjectiveLength { expected: usize, found: usize },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
    #[error("malformed game file: {0}")]
    MalformedGame(String),
    #[error("game must have exactly 2 players, found {0}")]
    NotTwoPlayer(usize),
    #[error("ragged payoff table: {0}")]
    RaggedPayoffs(String),
    #[error("unknown builtin game {0:?} (expected pd, poker or chicken)")]
    UnknownBuiltin(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Stable machine-readable code, printed by the CLI next to the message.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidProfile { .. } => "invalid-profile",
            Error::InvalidPlayer(_) => "invalid-player",
            Error::StrategyOutOfRange { .. } => "strategy-out-of-range",
            Error::InvalidDistribution(_) => "invalid-distribution",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NotTwoByTwo { .. } => "not-2x2",
            Error::DegenerateState => "degenerate-state",
            Error::NotUnitary { .. } => "not-unitary",
            Error::GammaOutOfRange(_) => "gamma-out-of-range",
            Error::ZeroSamples => "zero-samples",
            Error::GridTooSmall { .. } => "grid-too-small",
            Error::ObjectiveLength { .. } => "objective-length",
            Error::Infeasible => "lp-infeasible",
            Error::Unbounded => "lp-unbounded",
            Error::InvalidRational(_) => "invalid-rational",
            Error::MalformedGame(_) => "malformed-json",
            Error::NotTwoPlayer(_) => "not-two-player",
            Error::RaggedPayoffs(_) => "ragged-payoffs",
            Error::UnknownBuiltin(_) => "unknown-builtin",
            Error::Io { .. } => "io",
        }
    }
}
