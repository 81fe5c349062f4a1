//! itfkit: platform modeling and interference analysis for hybrid
//! CPU+accelerator platforms.
//!
//! The toolkit formalizes a platform as a component graph (initiators,
//! targets, transporters, composites) described either programmatically
//! or in the `.pml` textual language ([`dsl`]). Software usage resolves
//! into transactions, paths from an initiator to a service on a target
//! ([`txn`]). On top of that sit the analyses supporting a multi-core /
//! airborne-hardware assessment:
//!
//! * [`interference`]: enumerate concurrent-transaction scenarios,
//!   classify them as itf / free / partial, identify interference
//!   channels, validate declared symmetries, and quotient scenarios into
//!   orbits;
//! * [`capacity`]: aggregate exact per-component demand and verify it
//!   against declared capacities;
//! * [`templates`]: generate model fragments for the accelerator
//!   taxonomy (tightly coupled, passive, semi-active, active; unitary or
//!   parallel) and merge them onto host platforms;
//! * [`report`]: deterministic JSON findings with objective tags and
//!   DOT export.
//!
//! Scenario classification is data-parallel; build with the default
//! `parallel` feature for a rayon-backed implementation or without it
//! for strictly sequential execution with identical results.

pub mod capacity;
pub mod diag;
pub mod dsl;
pub mod error;
pub mod interference;
pub mod model;
pub mod parallel;
pub mod report;
pub mod templates;
pub mod txn;

pub use diag::{DiagCode, Diagnostic, Severity, SourceSpan};
pub use error::AnalysisError;
pub use model::{
    flatten, successors, validate_platform, Component, ComponentId, FlatPlatform, Link, Platform,
    Role, ServiceKind, SymmetryClass,
};
