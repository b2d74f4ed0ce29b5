use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Reasons a model document or model invariant is rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationKind {
    Malformed,
    Probability,
    NonContractive,
    DomainEscape,
    Sosc,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {x} lies outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("derivative vanishes at x = {x}")]
    Degenerate { x: f64 },

    #[error("{message}")]
    Validation { kind: ValidationKind, message: String },

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(kind: ValidationKind, message: impl Into<String>) -> Self {
        Error::Validation {
            kind,
            message: message.into(),
        }
    }

    /// Short category name for diagnostics.
    pub fn kind_label(&self) -> &'static str {
        match self {
            Error::Validation { kind, .. } => match kind {
                ValidationKind::Malformed => "malformed",
                ValidationKind::Probability => "probability",
                ValidationKind::NonContractive => "non-contractive",
                ValidationKind::DomainEscape => "domain-escape",
                ValidationKind::Sosc => "sosc",
            },
            Error::Domain { .. } => "domain",
            Error::Model(_) => "model",
            Error::Degenerate { .. } => "degenerate",
            Error::Resource(_) => "resource",
            Error::Unsupported(_) => "unsupported",
            Error::Numeric(_) => "numeric",
            Error::Estimation(_) => "estimation",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    /// Process exit code: 1 validation, 2 numeric failure, 3 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 3,
            Error::Numeric(_) | Error::Estimation(_) | Error::Degenerate { .. } => 2,
            _ => 1,
        }
    }
}
