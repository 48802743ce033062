use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps these onto its exit-code contract: parameter and domain
/// problems are validation failures, `NumericConsistency` signals that two
/// independent evaluation routes disagreed beyond tolerance.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a precondition; `field` names the offending input.
    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: &'static str, message: String },

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error in {op}: {message}")]
    Domain { op: &'static str, message: String },

    /// Two independent computations of the same quantity disagree.
    #[error("numeric consistency failure in {what}: {detail}")]
    NumericConsistency { what: &'static str, detail: String },

    /// The request exceeds a documented size cap.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Paired inputs do not share the same atom set.
    #[error("atom-set mismatch: {0}")]
    AtomMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        message: message.into(),
    }
}

pub(crate) fn domain(op: &'static str, message: impl Into<String>) -> Error {
    Error::Domain {
        op,
        message: message.into(),
    }
}
