use thiserror::Error;

/// Errors produced by samplers, geometry and the network model.
#[derive(Debug, Error)]
pub enum HetnetError {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("invalid configuration field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("degenerate scenario: {0}")]
    DegenerateScenario(String),

    #[error("insufficient window: {0}")]
    InsufficientWindow(String),

    #[error("network has no base stations")]
    EmptyNetwork,

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("unknown metric `{name}` (known: {known})")]
    UnknownMetric { name: String, known: String },

    #[error("unknown preset `{name}` (valid presets: {valid})")]
    UnknownPreset { name: String, valid: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HetnetError>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> HetnetError {
    HetnetError::Parameter {
        name,
        reason: reason.into(),
    }
}
