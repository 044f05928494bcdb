use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("incomplete coefficient map: missing index ({0}, {1})")]
    IncompleteCoefficients(usize, usize),
    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },
    #[error("wiring error: {0}")]
    Wiring(String),
    #[error("state is not normalized (norm {0})")]
    Normalization(f64),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("measurement basis {basis} unavailable for d = {dim}")]
    BasisUnavailable { basis: String, dim: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("parameters outside the close-to-identity regime (r0^2 = {0})")]
    OutOfRegime(f64),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("parameter label mismatch")]
    LabelMismatch,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("matrix is not row-stochastic: {0}")]
    NonStochastic(String),
    #[error("readout mitigation unavailable: confusion matrix is singular")]
    MitigationUnavailable,
    #[error("unknown noise scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid-dimension",
            Error::Shape(_) => "shape-error",
            Error::IncompleteCoefficients(..) => "incomplete-coefficients",
            Error::Index { .. } => "index-error",
            Error::Wiring(_) => "wiring-error",
            Error::Normalization(_) => "normalization-error",
            Error::LayoutMismatch(_) => "layout-mismatch",
            Error::InvalidDistribution(_) => "invalid-distribution",
            Error::BasisUnavailable { .. } => "basis-unavailable",
            Error::InsufficientData(_) => "insufficient-data",
            Error::OutOfRegime(_) => "out-of-regime",
            Error::InvalidModel(_) => "invalid-model",
            Error::LabelMismatch => "label-mismatch",
            Error::InvalidParameters(_) => "invalid-parameters",
            Error::NonStochastic(_) => "non-stochastic",
            Error::MitigationUnavailable => "mitigation-unavailable",
            Error::UnknownScenario(_) => "unknown-scenario",
            Error::InvalidConfig(_) => "invalid-config",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
