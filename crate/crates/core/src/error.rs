use thiserror::Error;

/// Errors raised while building games or running the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite payoff {value} for player {player} at joint action {joint:?}")]
    NonFinite {
        player: usize,
        joint: Vec<usize>,
        value: f64,
    },

    #[error("utility {value} for player {player} at joint action {joint:?} is not strictly positive")]
    NonPositiveUtility {
        player: usize,
        joint: Vec<usize>,
        value: f64,
    },

    #[error("expected return {value} of action {action} for player {player} is not strictly positive")]
    NonPositiveReturn {
        player: usize,
        action: usize,
        value: f64,
    },

    #[error("player index {player} out of range for a {players}-player game")]
    PlayerOutOfRange { player: usize, players: usize },

    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("joint action space of {size} entries exceeds the limit of {limit}")]
    TooLarge { size: u128, limit: u128 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("imaginary-time step failed for player {player}: {reason}; try dt <= {suggested_dt:.3e}")]
    StepFailure {
        player: usize,
        reason: String,
        suggested_dt: f64,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
