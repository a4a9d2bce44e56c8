use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("missing weight for edge {0}")]
    MissingWeight(usize),
    #[error("edge {0} has zero weight")]
    ZeroWeight(usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("input graph is disconnected")]
    Disconnected,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("generator gave up: {0}")]
    GeneratorExhausted(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag, used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedRational(_) => "malformed_rational",
            Error::MissingWeight(_) => "missing_weight",
            Error::ZeroWeight(_) => "zero_weight",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::Disconnected => "disconnected_input",
            Error::Precondition(_) => "precondition",
            Error::Invariant(_) => "invariant_violation",
            Error::Unsupported(_) => "unsupported_input",
            Error::UnknownFixture(_) => "unknown_fixture",
            Error::GeneratorExhausted(_) => "generator_exhausted",
            Error::Json(_) => "malformed_json",
        }
    }
}
