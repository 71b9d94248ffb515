use thiserror::Error;

/// Errors raised anywhere in the evaluation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("division by near-zero germ (value {0:e})")]
    NearZeroDivision(f64),

    #[error("function domain error: {func} at {value}")]
    FunctionDomain { func: String, value: f64 },

    #[error("cannot differentiate an order-0 jet")]
    OrderZero,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid metric: {0}")]
    InvalidSpec(String),

    #[error("in component g[{i}][{j}]: {source}")]
    Component {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate metric at point {0:?}")]
    DegenerateMetric(Vec<f64>),

    #[error("jet budget exhausted; raise --order (need order {needed}, have {available})")]
    JetBudget { needed: usize, available: usize },

    #[error("no valid sample points ({skipped} skipped)")]
    NoValidPoints { skipped: usize },

    #[error("signature violation: {0}")]
    Signature(String),

    #[error("expression depends on v: {0}")]
    VDependence(String),

    #[error("profile degree {degree} exceeds jet budget (max {max})")]
    DegreeOverBudget { degree: usize, max: usize },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
}

impl Error {
    /// True for failures of the numerics (degeneracy, jet budget), as opposed
    /// to malformed input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::NearZeroDivision(_)
            | Error::FunctionDomain { .. }
            | Error::DegenerateMetric(_)
            | Error::JetBudget { .. }
            | Error::NoValidPoints { .. } => true,
            Error::Component { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
