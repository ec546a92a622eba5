use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("registry mismatch: {0}")]
    Registry(String),

    #[error("algebra structure: {0}")]
    Algebra(String),

    #[error("bracket closure exceeded the step bound {bound}")]
    StepBound { bound: usize },

    #[error("vector fields are not independent: {0}")]
    Dependent(String),

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("the basis contains no central element of stratum one")]
    NoCentralElement,

    #[error("no tie-break branch yields a maximal subordinate subalgebra ({} branches tried)", trace.len())]
    NoMaximalBranch { trace: Vec<String> },

    #[error("subordinate subalgebra check failed: {0}")]
    Subordinate(String),

    #[error("ansatz powers of rho do not align: {0}")]
    Ansatz(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("stage `{stage}` failed: {cause}")]
    Stage { stage: String, cause: Box<Error> },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Broad classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Check,
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. } | Error::Input(_) | Error::Json(_) | Error::Registry(_) => {
                ErrorClass::Input
            }
            Error::Numeric(_) => ErrorClass::Numeric,
            Error::Stage { cause, .. } => cause.class(),
            _ => ErrorClass::Check,
        }
    }

    pub fn stage(stage: &str, cause: Error) -> Error {
        Error::Stage {
            stage: stage.to_string(),
            cause: Box::new(cause),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
