//! Diagnostics: stable codes, severities, and source locations.
//!
//! Every check in the toolkit reports problems as [`Diagnostic`] values
//! rather than panicking or aborting on the first issue. Codes are drawn
//! from the closed set in [`DiagCode`]; their rendered form (`E_*` / `W_*`)
//! is stable and safe to match on in scripts.

use std::fmt;

use serde::Serialize;

/// A 1-based location in a model source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        Self {
            file: file.into(),
            line,
            column,
        }
    }

    /// Placeholder span for platforms built programmatically.
    pub fn synthetic(origin: &str) -> Self {
        Self::new(format!("<{origin}>"), 1, 1)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// The closed set of diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiagCode {
    /// Syntax error in model text.
    Parse,
    /// Identifier violates the `[A-Za-z_][A-Za-z0-9_]*` segment syntax.
    BadId,
    /// Component, application, or transaction name declared twice.
    DupId,
    /// Reference to a component that does not exist.
    UnknownComponent,
    /// Composite declared without children.
    EmptyComposite,
    /// Target exposes no service.
    TargetNoService,
    /// Capacity declared on an initiator.
    CapacityRole,
    /// Device classified simple without a justification note.
    SimpleUnjustified,
    /// Link from a component to itself.
    SelfLink,
    /// Duplicate (from, to) link.
    DupLink,
    /// Link endpoint resolves to a composite.
    LinkNotAtomic,
    /// Platform has no initiator.
    NoInitiator,
    /// Platform has no target.
    NoTarget,
    /// Symmetry class with fewer than two members or repeated members.
    SymmetryClass,
    /// Transaction hop without a declared link.
    BadPath,
    /// Transaction service not exposed by its target.
    NoService,
    /// Component has the wrong role for the operation.
    Role,
    /// A member transposition is not a platform automorphism.
    NotSymmetric,
    /// Accelerator claimed unitary but used by several applications.
    UnitaryViolation,
    /// A complex device abstracted as a single target; internal
    /// transactions are assumed non-interfering and must be verified.
    Abstraction,
    /// A declared transaction path is not the only route between its
    /// endpoints; the other routes are candidate interference.
    UndeclaredRoute,
    /// Transaction without rate or payload, excluded from capacity sums.
    UnspecifiedDemand,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::Parse => "E_PARSE",
            DiagCode::BadId => "E_BAD_ID",
            DiagCode::DupId => "E_DUP_ID",
            DiagCode::UnknownComponent => "E_UNKNOWN_COMPONENT",
            DiagCode::EmptyComposite => "E_EMPTY_COMPOSITE",
            DiagCode::TargetNoService => "E_TARGET_NO_SERVICE",
            DiagCode::CapacityRole => "E_CAPACITY_ROLE",
            DiagCode::SimpleUnjustified => "E_SIMPLE_UNJUSTIFIED",
            DiagCode::SelfLink => "E_SELF_LINK",
            DiagCode::DupLink => "E_DUP_LINK",
            DiagCode::LinkNotAtomic => "E_LINK_NOT_ATOMIC",
            DiagCode::NoInitiator => "E_NO_INITIATOR",
            DiagCode::NoTarget => "E_NO_TARGET",
            DiagCode::SymmetryClass => "E_SYMMETRY_CLASS",
            DiagCode::BadPath => "E_BAD_PATH",
            DiagCode::NoService => "E_NO_SERVICE",
            DiagCode::Role => "E_ROLE",
            DiagCode::NotSymmetric => "E_NOT_SYMMETRIC",
            DiagCode::UnitaryViolation => "E_UNITARY_VIOLATION",
            DiagCode::Abstraction => "W_ABSTRACTION",
            DiagCode::UndeclaredRoute => "W_UNDECLARED_ROUTE",
            DiagCode::UnspecifiedDemand => "W_UNSPECIFIED_DEMAND",
        }
    }

    pub fn default_severity(self) -> Severity {
        match self {
            DiagCode::Abstraction
            | DiagCode::UndeclaredRoute
            | DiagCode::UnspecifiedDemand => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn new(code: DiagCode, message: impl Into<String>, span: SourceSpan) -> Self {
        Self {
            severity: code.default_severity(),
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {} [{}]: {}", self.span, sev, self.code, self.message)
    }
}

/// True when any diagnostic in the slice is an error.
pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
