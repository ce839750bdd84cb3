use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRatError(pub String);

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polyhedron is empty")]
    Infeasible,
    #[error("polyhedron is unbounded ({rays} extreme rays)")]
    Unbounded { rays: usize },
    #[error("budget exceeded: {what} ({count} > {cap})")]
    BudgetExceeded { what: &'static str, count: usize, cap: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("coefficient {index} is negative")]
    NegativeCoefficient { index: usize },
    #[error("n = {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("requested {requested} points but only {available} exist")]
    TooManyRequested { requested: u128, available: u128 },
    #[error("direction has squared norm {0} > 1")]
    NormTooLarge(String),
    #[error("no separating sparse cut after {tries} tries (best margin {best_margin})")]
    NotSeparated { tries: usize, best_margin: f64 },
    #[error("halfspace is empty within the box or contains the whole box")]
    DegenerateBox,
    #[error(transparent)]
    Parse(#[from] ParseRatError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Stable machine-readable tag for CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::Infeasible => "Infeasible",
            Error::Unbounded { .. } => "Unbounded",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::Precondition(_) => "Precondition",
            Error::NegativeCoefficient { .. } => "NegativeCoefficient",
            Error::NotPowerOfTwo(_) => "NotPowerOfTwo",
            Error::TooManyRequested { .. } => "TooManyRequested",
            Error::NormTooLarge(_) => "NormTooLarge",
            Error::NotSeparated { .. } => "NotSeparated",
            Error::DegenerateBox => "DegenerateBox",
            Error::Parse(_) => "Parse",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
            Error::Io(_) => "Io",
        }
    }
}
