//! In-memory platform model: a labeled directed graph of components with
//! hierarchical (composite) structure, plus structural validation and
//! flattening into the atomic view all analyses run on.
//!
//! Components play one of three atomic roles. Initiators originate
//! requests, targets expose services that satisfy them, transporters carry
//! transactions in between. Composites group components for structured
//! models and contribute their name as a path segment to the qualified ids
//! of their children (`ARMPack.A15_0`).
//!
//! Platforms are plain data and freely mutable while being built; every
//! analysis entry point goes through [`flatten`], which re-checks validity
//! and yields an immutable [`FlatPlatform`] that is safe to query
//! concurrently.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::diag::{DiagCode, Diagnostic, SourceSpan};
use crate::error::AnalysisError;
use crate::txn::Application;

/// Qualified component identifier: dot-joined path segments, each matching
/// `[A-Za-z_][A-Za-z0-9_]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ComponentId(String);

impl ComponentId {
    pub fn new(id: impl Into<String>) -> Self {
        ComponentId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split('.')
    }

    /// `ARMPack` + `A15_0` -> `ARMPack.A15_0`.
    pub fn child(&self, segment: &str) -> ComponentId {
        ComponentId(format!("{}.{}", self.0, segment))
    }

    /// Whether every segment matches the identifier syntax.
    pub fn is_well_formed(&self) -> bool {
        !self.0.is_empty() && self.segments().all(is_identifier)
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ComponentId {
    fn from(s: &str) -> Self {
        ComponentId::new(s)
    }
}

/// True for a single path segment matching `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A service a component exposes to software (`load`, `store`, `config`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ServiceKind(String);

impl ServiceKind {
    pub fn new(name: impl Into<String>) -> Self {
        ServiceKind(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ServiceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ServiceKind {
    fn from(s: &str) -> Self {
        ServiceKind::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Initiator,
    Target,
    Transporter,
    Composite,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Initiator => "initiator",
            Role::Target => "target",
            Role::Transporter => "transporter",
            Role::Composite => "composite",
        }
    }
}

/// Provenance of a device per the airborne-hardware classification scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    CotsDevice,
    CotsIpSoft,
    CotsIpHard,
    Custom,
}

impl Origin {
    pub fn keyword(self) -> &'static str {
        match self {
            Origin::CotsDevice => "cots",
            Origin::CotsIpSoft => "cots_soft_ip",
            Origin::CotsIpHard => "cots_hard_ip",
            Origin::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Complexity {
    Simple,
    Complex,
}

impl Complexity {
    pub fn keyword(self) -> &'static str {
        match self {
            Complexity::Simple => "simple",
            Complexity::Complex => "complex",
        }
    }
}

/// Inert assessment metadata surfaced in reports; gates no analysis.
/// Simple classifications require an explicit justification in `notes`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DeviceClassification {
    pub origin: Origin,
    pub complexity: Complexity,
    pub notes: String,
}

/// A component declaration. `name` is the local (unqualified) segment;
/// qualified ids are produced by [`flatten`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub role: Role,
    pub services: BTreeSet<ServiceKind>,
    pub capacity: Option<u64>,
    pub classification: Option<DeviceClassification>,
    pub children: Vec<Component>,
}

impl Component {
    pub fn new(name: impl Into<String>, role: Role) -> Self {
        Component {
            name: name.into(),
            role,
            services: BTreeSet::new(),
            capacity: None,
            classification: None,
            children: Vec::new(),
        }
    }

    pub fn initiator(name: impl Into<String>) -> Self {
        Component::new(name, Role::Initiator)
    }

    pub fn target(name: impl Into<String>) -> Self {
        Component::new(name, Role::Target)
    }

    pub fn transporter(name: impl Into<String>) -> Self {
        Component::new(name, Role::Transporter)
    }

    pub fn composite(name: impl Into<String>, children: Vec<Component>) -> Self {
        Component {
            children,
            ..Component::new(name, Role::Composite)
        }
    }

    pub fn with_service(mut self, service: impl Into<ServiceKind>) -> Self {
        self.services.insert(service.into());
        self
    }

    pub fn with_capacity(mut self, bytes_per_second: u64) -> Self {
        self.capacity = Some(bytes_per_second);
        self
    }

    pub fn with_classification(mut self, c: DeviceClassification) -> Self {
        self.classification = Some(c);
        self
    }

    fn sort_recursive(&mut self) {
        self.children.sort_by(|a, b| a.name.cmp(&b.name));
        for c in &mut self.children {
            c.sort_recursive();
        }
    }
}

/// A directed link; both endpoints are qualified ids of atomic components.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Link {
    pub from: ComponentId,
    pub to: ComponentId,
}

impl Link {
    pub fn new(from: impl Into<ComponentId>, to: impl Into<ComponentId>) -> Self {
        Link {
            from: from.into(),
            to: to.into(),
        }
    }
}

/// Declared set of interchangeable atomic components. Declaring a class is
/// a modeling claim; [`crate::interference::validate_symmetry`] checks it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryClass {
    pub name: String,
    pub members: Vec<ComponentId>,
}

impl SymmetryClass {
    pub fn new(name: impl Into<String>, members: Vec<ComponentId>) -> Self {
        SymmetryClass {
            name: name.into(),
            members,
        }
    }
}

/// A platform: component tree, links, symmetry declarations, and the
/// applications whose transactions use it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Platform {
    pub name: String,
    pub components: Vec<Component>,
    pub links: Vec<Link>,
    pub symmetries: Vec<SymmetryClass>,
    pub applications: Vec<Application>,
}

impl Platform {
    pub fn new(name: impl Into<String>) -> Self {
        Platform {
            name: name.into(),
            ..Platform::default()
        }
    }

    pub fn with_component(mut self, c: Component) -> Self {
        self.components.push(c);
        self
    }

    pub fn with_link(mut self, from: &str, to: &str) -> Self {
        self.links.push(Link {
            from: ComponentId::new(from),
            to: ComponentId::new(to),
        });
        self
    }

    /// Sort every declaration list so structurally equal platforms compare
    /// equal regardless of authoring order. Transaction paths and member
    /// semantics are untouched; symmetry members are sorted because a class
    /// denotes a set.
    pub fn canonicalize(&mut self) {
        self.components.sort_by(|a, b| a.name.cmp(&b.name));
        for c in &mut self.components {
            c.sort_recursive();
        }
        self.links.sort();
        for s in &mut self.symmetries {
            s.members.sort();
        }
        self.symmetries.sort_by(|a, b| a.name.cmp(&b.name));
        for app in &mut self.applications {
            app.transactions.sort_by(|a, b| a.name.cmp(&b.name));
        }
        self.applications.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn canonical(&self) -> Platform {
        let mut p = self.clone();
        p.canonicalize();
        p
    }

    /// Order-insensitive structural equality.
    pub fn structurally_eq(&self, other: &Platform) -> bool {
        self.canonical() == other.canonical()
    }

    /// All transactions across applications, ordered by (app, name).
    pub fn transactions(&self) -> Vec<&crate::txn::Transaction> {
        let mut all: Vec<_> = self
            .applications
            .iter()
            .flat_map(|a| a.transactions.iter())
            .collect();
        all.sort_by(|a, b| (&a.app, &a.name).cmp(&(&b.app, &b.name)));
        all
    }

    pub fn application(&self, name: &str) -> Option<&Application> {
        self.applications.iter().find(|a| a.name == name)
    }

    pub fn application_mut(&mut self, name: &str) -> Option<&mut Application> {
        self.applications.iter_mut().find(|a| a.name == name)
    }
}

/// An atomic component with its qualified id, as seen after flattening.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatComponent {
    pub id: ComponentId,
    pub role: Role,
    pub services: BTreeSet<ServiceKind>,
    pub capacity: Option<u64>,
    pub classification: Option<DeviceClassification>,
}

/// Atomic view of a valid platform: components keyed by qualified id plus
/// the link relation with precomputed successor lists. Immutable; all
/// queries are pure and safe for concurrent reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatPlatform {
    pub name: String,
    components: BTreeMap<ComponentId, FlatComponent>,
    links: BTreeSet<(ComponentId, ComponentId)>,
    successors: BTreeMap<ComponentId, Vec<ComponentId>>,
    pub symmetries: Vec<SymmetryClass>,
}

impl FlatPlatform {
    pub fn component(&self, id: &ComponentId) -> Option<&FlatComponent> {
        self.components.get(id)
    }

    pub fn components(&self) -> impl Iterator<Item = &FlatComponent> {
        self.components.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &ComponentId> {
        self.components.keys()
    }

    pub fn has_link(&self, from: &ComponentId, to: &ComponentId) -> bool {
        self.links.contains(&(from.clone(), to.clone()))
    }

    pub fn links(&self) -> impl Iterator<Item = &(ComponentId, ComponentId)> {
        self.links.iter()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Direct successors of `c`, sorted by id.
    pub fn successors(&self, c: &ComponentId) -> Result<&[ComponentId], AnalysisError> {
        if !self.components.contains_key(c) {
            return Err(AnalysisError::UnknownComponent(c.clone()));
        }
        Ok(self
            .successors
            .get(c)
            .map(|v| v.as_slice())
            .unwrap_or(&[]))
    }

    pub fn components_with_role(&self, role: Role) -> impl Iterator<Item = &FlatComponent> {
        self.components.values().filter(move |c| c.role == role)
    }

    /// Rebuild a (flat) platform value; component names keep their
    /// qualified dotted form, so flattening it again is the identity.
    pub fn to_platform(&self) -> Platform {
        Platform {
            name: self.name.clone(),
            components: self
                .components
                .values()
                .map(|fc| Component {
                    name: fc.id.as_str().to_string(),
                    role: fc.role,
                    services: fc.services.clone(),
                    capacity: fc.capacity,
                    classification: fc.classification.clone(),
                    children: Vec::new(),
                })
                .collect(),
            links: self
                .links
                .iter()
                .map(|(f, t)| Link {
                    from: f.clone(),
                    to: t.clone(),
                })
                .collect(),
            symmetries: self.symmetries.clone(),
            applications: Vec::new(),
        }
    }
}

/// A span provider used to locate diagnostics. The parser registers real
/// source spans; programmatic construction falls back to a synthetic span.
pub(crate) struct SpanTable {
    pub file: String,
    pub spans: BTreeMap<String, SourceSpan>,
}

impl SpanTable {
    pub fn synthetic(origin: &str) -> Self {
        SpanTable {
            file: format!("<{origin}>"),
            spans: BTreeMap::new(),
        }
    }

    pub fn get(&self, key: &str) -> SourceSpan {
        self.spans
            .get(key)
            .cloned()
            .unwrap_or_else(|| SourceSpan::new(self.file.clone(), 1, 1))
    }
}

/// Check every structural invariant of `p` and return all violations.
/// An empty result means the platform is valid.
pub fn validate_platform(p: &Platform) -> Vec<Diagnostic> {
    validate_with_spans(p, &SpanTable::synthetic(&p.name))
}

pub(crate) fn validate_with_spans(p: &Platform, spans: &SpanTable) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut atoms: BTreeMap<ComponentId, &Component> = BTreeMap::new();
    let mut seen: BTreeSet<ComponentId> = BTreeSet::new();

    collect_components(&p.components, None, spans, &mut atoms, &mut seen, &mut diags);

    // Component-level invariants.
    for (id, c) in &atoms {
        let span = spans.get(id.as_str());
        if c.role == Role::Target && c.services.is_empty() {
            diags.push(Diagnostic::new(
                DiagCode::TargetNoService,
                format!("target `{id}` exposes no service"),
                span.clone(),
            ));
        }
        if c.capacity.is_some() && c.role == Role::Initiator {
            diags.push(Diagnostic::new(
                DiagCode::CapacityRole,
                format!("capacity declared on initiator `{id}`"),
                span.clone(),
            ));
        }
        if let Some(cls) = &c.classification {
            if cls.complexity == Complexity::Simple && cls.notes.trim().is_empty() {
                diags.push(Diagnostic::new(
                    DiagCode::SimpleUnjustified,
                    format!("`{id}` is classified simple without a justification"),
                    span,
                ));
            }
        }
    }

    // Role census after flattening.
    if !atoms.values().any(|c| c.role == Role::Initiator) {
        diags.push(Diagnostic::new(
            DiagCode::NoInitiator,
            format!("platform `{}` has no initiator", p.name),
            spans.get(&p.name),
        ));
    }
    if !atoms.values().any(|c| c.role == Role::Target) {
        diags.push(Diagnostic::new(
            DiagCode::NoTarget,
            format!("platform `{}` has no target", p.name),
            spans.get(&p.name),
        ));
    }

    // Links: endpoints exist, are atomic, no self-links, no duplicates.
    let mut seen_links: BTreeSet<(&ComponentId, &ComponentId)> = BTreeSet::new();
    for link in &p.links {
        let key = format!("link {} -> {}", link.from, link.to);
        let span = spans.get(&key);
        for (end, side) in [(&link.from, "from"), (&link.to, "to")] {
            if !atoms.contains_key(end) {
                diags.push(Diagnostic::new(
                    DiagCode::UnknownComponent,
                    format!("link endpoint `{end}` does not exist"),
                    spans.get(&format!("{key} {side}")),
                ));
            }
        }
        if link.from == link.to {
            diags.push(Diagnostic::new(
                DiagCode::SelfLink,
                format!("self-link at `{}`", link.from),
                span.clone(),
            ));
        }
        if !seen_links.insert((&link.from, &link.to)) {
            diags.push(Diagnostic::new(
                DiagCode::DupLink,
                format!("duplicate link {} -> {}", link.from, link.to),
                span,
            ));
        }
    }

    // Symmetry class structure (the automorphism check is a separate op).
    for sc in &p.symmetries {
        let span = spans.get(&format!("symmetry {}", sc.name));
        if sc.members.len() < 2 {
            diags.push(Diagnostic::new(
                DiagCode::SymmetryClass,
                format!("symmetry class `{}` needs at least 2 members", sc.name),
                span.clone(),
            ));
        }
        let distinct: BTreeSet<_> = sc.members.iter().collect();
        if distinct.len() != sc.members.len() {
            diags.push(Diagnostic::new(
                DiagCode::SymmetryClass,
                format!("symmetry class `{}` repeats a member", sc.name),
                span.clone(),
            ));
        }
        let mut roles = BTreeSet::new();
        for m in &sc.members {
            match atoms.get(m) {
                None => diags.push(Diagnostic::new(
                    DiagCode::UnknownComponent,
                    format!("symmetry class `{}` member `{m}` does not exist", sc.name),
                    spans.get(&format!("symmetry {} {m}", sc.name)),
                )),
                Some(c) => {
                    roles.insert(c.role);
                }
            }
        }
        if roles.len() > 1 {
            diags.push(Diagnostic::new(
                DiagCode::SymmetryClass,
                format!("symmetry class `{}` mixes roles", sc.name),
                span,
            ));
        }
    }

    // Applications: unique names, unique transaction names, resolvable
    // path references. Path/link/service semantics live in
    // `txn::resolve_transactions`.
    let mut app_names = BTreeSet::new();
    for app in &p.applications {
        let app_span = spans.get(&format!("application {}", app.name));
        if !app_names.insert(&app.name) {
            diags.push(Diagnostic::new(
                DiagCode::DupId,
                format!("duplicate application `{}`", app.name),
                app_span.clone(),
            ));
        }
        let mut txn_names = BTreeSet::new();
        for t in &app.transactions {
            let t_span = spans.get(&format!("transaction {}.{}", app.name, t.name));
            if !txn_names.insert(&t.name) {
                diags.push(Diagnostic::new(
                    DiagCode::DupId,
                    format!("duplicate transaction `{}` in `{}`", t.name, app.name),
                    t_span.clone(),
                ));
            }
            for hop in &t.path {
                if !atoms.contains_key(hop) {
                    diags.push(Diagnostic::new(
                        DiagCode::UnknownComponent,
                        format!("transaction `{}.{}` references `{hop}`", app.name, t.name),
                        spans.get(&format!("transaction {}.{} {hop}", app.name, t.name)),
                    ));
                }
            }
        }
    }

    diags
}

fn collect_components<'a>(
    components: &'a [Component],
    parent: Option<&ComponentId>,
    spans: &SpanTable,
    atoms: &mut BTreeMap<ComponentId, &'a Component>,
    seen: &mut BTreeSet<ComponentId>,
    diags: &mut Vec<Diagnostic>,
) {
    for c in components {
        let id = match parent {
            Some(p) => p.child(&c.name),
            None => ComponentId::new(c.name.clone()),
        };
        let span = spans.get(id.as_str());
        if !id.is_well_formed() {
            diags.push(Diagnostic::new(
                DiagCode::BadId,
                format!("`{id}` is not a well-formed identifier"),
                span.clone(),
            ));
        }
        if !seen.insert(id.clone()) {
            diags.push(Diagnostic::new(
                DiagCode::DupId,
                format!("duplicate component `{id}`"),
                span.clone(),
            ));
        }
        match c.role {
            Role::Composite => {
                if c.children.is_empty() {
                    diags.push(Diagnostic::new(
                        DiagCode::EmptyComposite,
                        format!("composite `{id}` has no children"),
                        span,
                    ));
                }
                collect_components(&c.children, Some(&id), spans, atoms, seen, diags);
            }
            _ => {
                if !c.children.is_empty() {
                    diags.push(Diagnostic::new(
                        DiagCode::Role,
                        format!("atomic `{id}` cannot have children"),
                        span,
                    ));
                }
                atoms.insert(id, c);
            }
        }
    }
}

/// Flatten a valid platform into its atomic view. Composite names fold
/// into qualified ids; atomic components and links are preserved exactly.
/// Fails with `E_NOT_VALIDATED` when `p` has outstanding diagnostics.
pub fn flatten(p: &Platform) -> Result<FlatPlatform, AnalysisError> {
    let diags = validate_platform(p);
    let errors: Vec<_> = diags.into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(AnalysisError::NotValidated(errors));
    }

    let mut components = BTreeMap::new();
    flatten_into(&p.components, None, &mut components);

    let links: BTreeSet<_> = p
        .links
        .iter()
        .map(|l| (l.from.clone(), l.to.clone()))
        .collect();
    let mut successors: BTreeMap<ComponentId, Vec<ComponentId>> = BTreeMap::new();
    for (from, to) in &links {
        successors.entry(from.clone()).or_default().push(to.clone());
    }
    // BTreeSet iteration is already sorted, so successor lists are too.

    Ok(FlatPlatform {
        name: p.name.clone(),
        components,
        links,
        successors,
        symmetries: p.symmetries.clone(),
    })
}

fn flatten_into(
    components: &[Component],
    parent: Option<&ComponentId>,
    out: &mut BTreeMap<ComponentId, FlatComponent>,
) {
    for c in components {
        let id = match parent {
            Some(p) => p.child(&c.name),
            None => ComponentId::new(c.name.clone()),
        };
        if c.role == Role::Composite {
            flatten_into(&c.children, Some(&id), out);
        } else {
            out.insert(
                id.clone(),
                FlatComponent {
                    id,
                    role: c.role,
                    services: c.services.clone(),
                    capacity: c.capacity,
                    classification: c.classification.clone(),
                },
            );
        }
    }
}

/// Direct successors of `c` in the flattened link graph.
pub fn successors(
    p: &FlatPlatform,
    c: &ComponentId,
) -> Result<Vec<ComponentId>, AnalysisError> {
    p.successors(c).map(|s| s.to_vec())
}
