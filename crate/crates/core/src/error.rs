use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("evaluation budget exhausted after {0} evaluations")]
    BudgetExhausted(usize),
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("time step {dt:e} exceeds the explicit stability limit {limit:e}")]
    UnstableTimeStep { dt: f64, limit: f64 },
    #[error("solver produced a non-finite field at step {0}")]
    Diverged(usize),
    #[error("probe {index} at ({x}, {y}) lies outside the domain")]
    ProbeOutside { index: usize, x: f64, y: f64 },
    #[error("rank-deficient least-squares system")]
    RankDeficient,
    #[error("evaluator failed: {0}")]
    Evaluator(String),
    #[error("training diverged at epoch {epoch} (loss {loss})")]
    TrainingDiverged { epoch: usize, loss: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("missing artifact: {0}")]
    MissingArtifact(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Stable machine-readable tag, used in the CLI's JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NonFinite(_) => "non_finite",
            Error::Empty(_) => "empty",
            Error::BudgetExhausted(_) => "budget_exhausted",
            Error::InvalidBounds(_) => "invalid_bounds",
            Error::UnstableTimeStep { .. } => "unstable_time_step",
            Error::Diverged(_) => "diverged",
            Error::ProbeOutside { .. } => "probe_outside",
            Error::RankDeficient => "rank_deficient",
            Error::Evaluator(_) => "evaluator",
            Error::TrainingDiverged { .. } => "training_diverged",
            Error::InvalidConfig(_) => "invalid_config",
            Error::MissingArtifact(_) => "missing_artifact",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
            Error::Toml(_) => "toml",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}
