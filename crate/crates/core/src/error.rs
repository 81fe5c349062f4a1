//! Operation errors.
//!
//! Structural problems in a model are reported as [`Diagnostic`] lists;
//! [`AnalysisError`] covers misuse of the analysis API itself (bad
//! arguments, unvalidated inputs, arithmetic overflow).

use thiserror::Error;

use crate::diag::Diagnostic;
use crate::model::ComponentId;

#[derive(Debug, Error)]
pub enum AnalysisError {
    /// E_NOT_VALIDATED: the platform has outstanding diagnostics.
    #[error("E_NOT_VALIDATED: platform has {} outstanding diagnostic(s), first: {}",
            .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    NotValidated(Vec<Diagnostic>),

    /// E_UNKNOWN_COMPONENT: a component id does not resolve.
    #[error("E_UNKNOWN_COMPONENT: no component named `{0}`")]
    UnknownComponent(ComponentId),

    /// E_ROLE: a component has the wrong role for the operation.
    #[error("E_ROLE: `{id}` is a {actual}, expected {expected}")]
    Role {
        id: ComponentId,
        expected: &'static str,
        actual: &'static str,
    },

    /// E_BAD_N: scenario size out of range.
    #[error("E_BAD_N: scenario size must be at least 2, got {0}")]
    BadN(usize),

    /// E_BAD_RULE: non-positive expansion rule field or empty payload.
    #[error("E_BAD_RULE: {0}")]
    BadRule(String),

    /// E_BAD_SPEC: template specification violates its invariants.
    #[error("E_BAD_SPEC: {0}")]
    BadSpec(String),

    /// E_ID_COLLISION: merged fragment reuses an existing name.
    #[error("E_ID_COLLISION: `{0}` already exists in the host platform")]
    IdCollision(String),

    /// E_DANGLING_BINDING: fragment transaction with no application binding.
    #[error("E_DANGLING_BINDING: no application bound for placeholder `{0}`")]
    DanglingBinding(String),

    /// E_UNVALIDATED_SYMMETRY: quotient called with an invalid symmetry class.
    #[error("E_UNVALIDATED_SYMMETRY: class `{class}`: {detail}")]
    UnvalidatedSymmetry { class: String, detail: String },

    /// E_OVERFLOW: demand aggregation exceeded integer range.
    #[error("E_OVERFLOW: demand sum exceeds integer range at `{0}`")]
    Overflow(ComponentId),
}

impl AnalysisError {
    /// The stable `E_*` code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            AnalysisError::NotValidated(_) => "E_NOT_VALIDATED",
            AnalysisError::UnknownComponent(_) => "E_UNKNOWN_COMPONENT",
            AnalysisError::Role { .. } => "E_ROLE",
            AnalysisError::BadN(_) => "E_BAD_N",
            AnalysisError::BadRule(_) => "E_BAD_RULE",
            AnalysisError::BadSpec(_) => "E_BAD_SPEC",
            AnalysisError::IdCollision(_) => "E_ID_COLLISION",
            AnalysisError::DanglingBinding(_) => "E_DANGLING_BINDING",
            AnalysisError::UnvalidatedSymmetry { .. } => "E_UNVALIDATED_SYMMETRY",
            AnalysisError::Overflow(_) => "E_OVERFLOW",
        }
    }
}
