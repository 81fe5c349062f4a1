//! Model templates for the accelerator taxonomy.
//!
//! Accelerators integrate along two hardware dimensions. The first is
//! access: unitary (one application at a time) or parallel. The second is
//! coupling, with four cases:
//!
//! 1. tightly coupled: a functional unit inside a core (vector unit);
//!    no new component, but the core's transactions take on a different
//!    profile, captured here as a worst-case access expansion rule;
//! 2. passive: configured by cores, initiates nothing; a pure target;
//! 3. semi-active: DMA-like, triggered by a controlling core whose
//!    profile must include the configuration transactions;
//! 4. active: initiates work on its own; one initiator when unitary,
//!    `k` initiators (one per symmetric engine) when parallel.
//!
//! [`instantiate`] turns a [`TemplateSpec`] into a [`Fragment`] that
//! [`merge`] grafts onto a host platform. The third, software dimension
//! (runtime layers with shared scheduling queues) is covered by
//! [`software_overlay`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::diag::{DiagCode, Diagnostic, SourceSpan};
use crate::error::AnalysisError;
use crate::model::{
    validate_platform, Complexity, Component, ComponentId, DeviceClassification, Link, Origin,
    Platform, ServiceKind, SymmetryClass,
};
use crate::txn::{expand_access, Application, ExpansionRule, Transaction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    TightlyCoupled,
    Passive,
    SemiActive,
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessModel {
    /// Used by one application at any given time.
    Unitary,
    /// Used by several applications simultaneously, decomposed into `k`
    /// engines modeled as separate initiators.
    Parallel(u32),
}

/// One configuration operation the controlling core issues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigOp {
    pub service: ServiceKind,
    pub rate: u64,
    pub payload: u64,
}

/// Where a fragment binds to its host.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HostBinding {
    /// Core driving the accelerator (semi-active/active command path).
    pub controller: Option<ComponentId>,
    /// Transporter the accelerator attaches to.
    pub attachment: ComponentId,
    /// Shared targets the accelerator reaches through the attachment.
    pub shared_targets: Vec<ComponentId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSpec {
    pub coupling: Coupling,
    pub access: AccessModel,
    pub name: String,
    pub host: HostBinding,
    /// Worst-case access profile; tightly coupled only.
    pub expansion: Option<ExpansionRule>,
    /// Configuration transactions the controller issues; semi-active and
    /// active only.
    pub config_profile: Vec<ConfigOp>,
    /// Declare generated parallel initiators as one symmetry class.
    pub symmetric: bool,
}

/// A transaction template carried by a fragment. The placeholder names
/// an application slot that `merge` binds to a real application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxnTemplate {
    pub name: String,
    pub app_placeholder: String,
    pub path: Vec<ComponentId>,
    pub service: ServiceKind,
    pub rate: u64,
    pub payload: u64,
}

/// Placeholder for the controlling application's binding.
pub const CONTROLLER_SLOT: &str = "controller";

/// A model fragment to graft onto a host platform.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Fragment {
    pub components: Vec<Component>,
    pub links: Vec<Link>,
    pub symmetries: Vec<SymmetryClass>,
    pub transactions_to_add: Vec<TxnTemplate>,
    /// Tightly coupled case: the host initiator whose transactions are
    /// expanded at merge time.
    pub expansion: Option<(ComponentId, ExpansionRule)>,
    /// Accelerator initiators claimed unitary, checked by
    /// [`verify_unitary`] once transactions are bound.
    pub unitary_initiators: Vec<ComponentId>,
}

impl Fragment {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
            && self.links.is_empty()
            && self.symmetries.is_empty()
            && self.transactions_to_add.is_empty()
            && self.expansion.is_none()
    }
}

/// Build the model fragment for a template specification.
pub fn instantiate(spec: &TemplateSpec) -> Result<Fragment, AnalysisError> {
    check_spec(spec)?;
    let mut f = Fragment::default();
    match spec.coupling {
        Coupling::TightlyCoupled => {
            // The core stays the sole initiator; only its transaction
            // profile changes.
            let controller = spec.host.controller.clone().expect("checked above");
            if let Some(rule) = spec.expansion {
                f.expansion = Some((controller, rule));
            }
        }
        Coupling::Passive => {
            // A resource used by the cores: a single shared target.
            f.components.push(
                Component::target(&spec.name)
                    .with_service("load")
                    .with_service("store")
                    .with_service("config")
                    .with_classification(DeviceClassification {
                        origin: Origin::CotsIpSoft,
                        complexity: Complexity::Complex,
                        notes: "internal transactions abstracted behind a single target".into(),
                    }),
            );
            f.links.push(Link::new(
                spec.host.attachment.clone(),
                ComponentId::new(spec.name.clone()),
            ));
        }
        Coupling::SemiActive | Coupling::Active => {
            let engines: Vec<String> = match spec.access {
                AccessModel::Unitary => vec![spec.name.clone()],
                AccessModel::Parallel(k) => {
                    (0..k).map(|i| format!("{}{}", spec.name, i)).collect()
                }
            };
            for e in &engines {
                f.components.push(Component::initiator(e));
                f.links.push(Link::new(
                    ComponentId::new(e.clone()),
                    spec.host.attachment.clone(),
                ));
            }
            if matches!(spec.access, AccessModel::Unitary) {
                f.unitary_initiators = engines.iter().map(|e| ComponentId::new(e.clone())).collect();
            }
            if spec.symmetric && engines.len() >= 2 {
                f.symmetries.push(SymmetryClass::new(
                    format!("{}_sym", spec.name),
                    engines.iter().map(|e| ComponentId::new(e.clone())).collect(),
                ));
            }
            if !spec.config_profile.is_empty() {
                // Command interface the controller drives the device
                // through, reached over the same attachment.
                let csb = ComponentId::new(format!("{}_csb", spec.name));
                f.components.push(
                    Component::target(csb.as_str()).with_service("config"),
                );
                f.links.push(Link::new(spec.host.attachment.clone(), csb.clone()));
                let controller = spec.host.controller.clone().expect("checked above");
                for (i, op) in spec.config_profile.iter().enumerate() {
                    f.transactions_to_add.push(TxnTemplate {
                        name: format!("{}_cfg{}", spec.name, i),
                        app_placeholder: CONTROLLER_SLOT.into(),
                        path: vec![
                            controller.clone(),
                            spec.host.attachment.clone(),
                            csb.clone(),
                        ],
                        service: op.service.clone(),
                        rate: op.rate,
                        payload: op.payload,
                    });
                }
            }
        }
    }
    Ok(f)
}

fn check_spec(spec: &TemplateSpec) -> Result<(), AnalysisError> {
    if let AccessModel::Parallel(k) = spec.access {
        if k < 2 {
            return Err(AnalysisError::BadSpec(format!(
                "parallel accelerator needs k >= 2, got {k}"
            )));
        }
        if matches!(spec.coupling, Coupling::TightlyCoupled | Coupling::Passive) {
            return Err(AnalysisError::BadSpec(
                "only semi-active and active accelerators can be parallel".into(),
            ));
        }
    }
    match spec.coupling {
        Coupling::TightlyCoupled => {
            if spec.host.controller.is_none() {
                return Err(AnalysisError::BadSpec(
                    "tightly coupled accelerator needs its hosting core as controller".into(),
                ));
            }
            if !spec.config_profile.is_empty() {
                return Err(AnalysisError::BadSpec(
                    "tightly coupled accelerators have no configuration path".into(),
                ));
            }
        }
        Coupling::Passive => {
            if !spec.config_profile.is_empty() {
                return Err(AnalysisError::BadSpec(
                    "passive accelerators initiate nothing; model controller traffic \
                     as ordinary transactions to the target"
                        .into(),
                ));
            }
            if spec.expansion.is_some() {
                return Err(AnalysisError::BadSpec(
                    "expansion rules apply to tightly coupled accelerators only".into(),
                ));
            }
        }
        Coupling::SemiActive | Coupling::Active => {
            if spec.expansion.is_some() {
                return Err(AnalysisError::BadSpec(
                    "expansion rules apply to tightly coupled accelerators only".into(),
                ));
            }
            if !spec.config_profile.is_empty() && spec.host.controller.is_none() {
                return Err(AnalysisError::BadSpec(
                    "a configuration profile needs a controller".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Graft a fragment onto a host platform. Fragment components and
/// symmetry classes must be fresh; every transaction template placeholder
/// must be bound to an application name. The merged platform is
/// revalidated before being returned.
pub fn merge(
    p: &Platform,
    f: &Fragment,
    app_bindings: &BTreeMap<String, String>,
) -> Result<Platform, AnalysisError> {
    let flat = crate::model::flatten(p)?;
    let mut merged = p.clone();

    for c in &f.components {
        if flat.component(&ComponentId::new(c.name.clone())).is_some()
            || p.components.iter().any(|existing| existing.name == c.name)
        {
            return Err(AnalysisError::IdCollision(c.name.clone()));
        }
        merged.components.push(c.clone());
    }
    for sc in &f.symmetries {
        if p.symmetries.iter().any(|existing| existing.name == sc.name) {
            return Err(AnalysisError::IdCollision(sc.name.clone()));
        }
        merged.symmetries.push(sc.clone());
    }
    merged.links.extend(f.links.iter().cloned());

    for t in &f.transactions_to_add {
        let app_name = app_bindings
            .get(&t.app_placeholder)
            .ok_or_else(|| AnalysisError::DanglingBinding(t.app_placeholder.clone()))?;
        let txn = Transaction {
            app: app_name.clone(),
            name: t.name.clone(),
            path: t.path.clone(),
            service: t.service.clone(),
            rate: t.rate,
            payload: t.payload,
        };
        match merged.application_mut(app_name) {
            Some(app) => {
                if app.transactions.iter().any(|existing| existing.name == t.name) {
                    return Err(AnalysisError::IdCollision(txn.qualified_name()));
                }
                app.transactions.push(txn);
            }
            None => {
                let mut app = Application::new(app_name.clone());
                app.transactions.push(txn);
                merged.applications.push(app);
            }
        }
    }

    if let Some((initiator, rule)) = &f.expansion {
        apply_expansion(&mut merged, initiator, rule)?;
    }

    let diags = validate_platform(&merged);
    let errors: Vec<_> = diags.into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(AnalysisError::NotValidated(errors));
    }
    Ok(merged)
}

/// Replace every payload-carrying transaction of `initiator` by its
/// worst-case line-sized sub-transactions.
fn apply_expansion(
    p: &mut Platform,
    initiator: &ComponentId,
    rule: &ExpansionRule,
) -> Result<(), AnalysisError> {
    for app in &mut p.applications {
        let mut rewritten = Vec::with_capacity(app.transactions.len());
        for t in app.transactions.drain(..) {
            if t.initiator() == initiator && t.payload > 0 {
                rewritten.extend(expand_access(&t, rule)?);
            } else {
                rewritten.push(t);
            }
        }
        app.transactions = rewritten;
    }
    Ok(())
}

/// Check the unitary-access claim: at most one application may own
/// transactions initiated by the accelerator.
pub fn verify_unitary(p: &Platform, accelerator: &ComponentId) -> Vec<Diagnostic> {
    let mut owners: Vec<&str> = p
        .transactions()
        .into_iter()
        .filter(|t| t.initiator() == accelerator)
        .map(|t| t.app.as_str())
        .collect();
    owners.sort_unstable();
    owners.dedup();
    if owners.len() > 1 {
        vec![Diagnostic::new(
            DiagCode::UnitaryViolation,
            format!(
                "accelerator `{accelerator}` is claimed unitary but applications [{}] \
                 own transactions it initiates",
                owners.join(", ")
            ),
            SourceSpan::synthetic(&p.name),
        )]
    } else {
        Vec::new()
    }
}

/// A runtime layer that comes with an accelerator: its shared scheduling
/// queue and the transactions it induces in the applications using it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeOverlay {
    pub name: String,
    /// The shared queue; created as a target with service `enqueue` when
    /// it does not already exist.
    pub queue_component: ComponentId,
    /// Concrete queue transactions, one per using application.
    pub induced: Vec<Transaction>,
}

/// Overlay a runtime's shared scheduling queue onto the platform so it
/// becomes a resource visible to the interference calculus.
pub fn software_overlay(p: &Platform, rt: &RuntimeOverlay) -> Result<Platform, AnalysisError> {
    let flat = crate::model::flatten(p)?;
    let mut overlaid = p.clone();

    let queue_is_new = flat.component(&rt.queue_component).is_none();
    if queue_is_new {
        if !rt.queue_component.is_well_formed() || rt.queue_component.segments().count() > 1 {
            return Err(AnalysisError::UnknownComponent(rt.queue_component.clone()));
        }
        overlaid.components.push(
            Component::target(rt.queue_component.as_str()).with_service("enqueue"),
        );
    }

    for t in &rt.induced {
        for hop in &t.path {
            let known = flat.component(hop).is_some() || *hop == rt.queue_component;
            if !known {
                return Err(AnalysisError::UnknownComponent(hop.clone()));
            }
        }
        // Wire the final hop into a freshly created queue.
        if let [.., last, end] = t.path.as_slice() {
            if *end == rt.queue_component && queue_is_new {
                let link = Link::new(last.clone(), end.clone());
                if !overlaid.links.contains(&link) {
                    overlaid.links.push(link);
                }
            }
        }
        match overlaid.application_mut(&t.app) {
            Some(app) => app.transactions.push(t.clone()),
            None => return Err(AnalysisError::UnknownComponent(ComponentId::new(t.app.clone()))),
        }
    }

    let diags = validate_platform(&overlaid);
    let errors: Vec<_> = diags.into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(AnalysisError::NotValidated(errors));
    }
    Ok(overlaid)
}

/// Render a fragment as `.pml` items ready to paste into a `platform` block.
pub fn render_fragment(f: &Fragment) -> String {
    let mut out = String::new();
    if let Some((initiator, rule)) = &f.expansion {
        let _ = writeln!(
            out,
            "// tightly coupled: no new components; transactions of `{initiator}`\n\
             // expand into worst-case sub-transactions \
             (width {}B, alignment {}B, line {}B) when merged",
            rule.width, rule.alignment, rule.line
        );
    }
    for c in &f.components {
        let mut attrs = Vec::new();
        if !c.services.is_empty() {
            let names: Vec<&str> = c.services.iter().map(|s| s.as_str()).collect();
            attrs.push(format!("service {};", names.join(", ")));
        }
        if let Some(cap) = c.capacity {
            attrs.push(format!("capacity {cap} Bps;"));
        }
        if let Some(cls) = &c.classification {
            let mut line = format!("class {} {}", cls.origin.keyword(), cls.complexity.keyword());
            if !cls.notes.is_empty() {
                let _ = write!(line, " \"{}\"", cls.notes.replace('\\', "\\\\").replace('"', "\\\""));
            }
            line.push(';');
            attrs.push(line);
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "{} {};", c.role.as_str(), c.name);
        } else {
            let _ = writeln!(out, "{} {} {{", c.role.as_str(), c.name);
            for a in attrs {
                let _ = writeln!(out, "  {a}");
            }
            let _ = writeln!(out, "}}");
        }
    }
    for l in &f.links {
        let _ = writeln!(out, "link {} -> {};", l.from, l.to);
    }
    for sc in &f.symmetries {
        let members: Vec<&str> = sc.members.iter().map(|m| m.as_str()).collect();
        let _ = writeln!(out, "symmetry {} {{ {} }}", sc.name, members.join(", "));
    }
    if !f.transactions_to_add.is_empty() {
        let mut by_slot: BTreeMap<&str, Vec<&TxnTemplate>> = BTreeMap::new();
        for t in &f.transactions_to_add {
            by_slot.entry(&t.app_placeholder).or_default().push(t);
        }
        for (slot, txns) in by_slot {
            let _ = writeln!(out, "// bind application slot `{slot}` when merging");
            let _ = writeln!(out, "application {slot} {{");
            for t in txns {
                let hops: Vec<&str> = t.path.iter().map(|c| c.as_str()).collect();
                let mut line = format!(
                    "  transaction {}: {} uses {}",
                    t.name,
                    hops.join(" -> "),
                    t.service
                );
                if t.rate > 0 {
                    let _ = write!(line, " rate {}/s", t.rate);
                }
                if t.payload > 0 {
                    let _ = write!(line, " size {}B", t.payload);
                }
                line.push(';');
                let _ = writeln!(out, "{line}");
            }
            let _ = writeln!(out, "}}");
        }
    }
    out
}
