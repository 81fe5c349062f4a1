//! Transactions: the footprints software leaves on the platform.
//!
//! A transaction is a request path from an initiator through transporters
//! to a service on a target, optionally with a sustained rate and payload.
//! This module resolves the usage declared in a model into checked
//! [`Transaction`] values, enumerates candidate paths for authors, and
//! expands payloads into worst-case per-line sub-transactions for
//! accelerators that live inside a core (vector units and similar).

use serde::Serialize;

use crate::diag::{DiagCode, Diagnostic, SourceSpan};
use crate::error::AnalysisError;
use crate::model::{flatten, ComponentId, FlatPlatform, Platform, Role, ServiceKind};

/// A named set of transactions owned by one software application.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Application {
    pub name: String,
    pub transactions: Vec<Transaction>,
}

impl Application {
    pub fn new(name: impl Into<String>) -> Self {
        Application {
            name: name.into(),
            transactions: Vec::new(),
        }
    }
}

/// An initiator-to-target request path with its service, rate, and payload.
/// `rate` and `payload` default to 0 meaning unspecified; such transactions
/// take part in interference analysis but are excluded from capacity sums.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Transaction {
    pub app: String,
    pub name: String,
    pub path: Vec<ComponentId>,
    pub service: ServiceKind,
    /// Transactions per second; 0 = unspecified.
    pub rate: u64,
    /// Bytes per transaction; 0 = unspecified.
    pub payload: u64,
}

impl Transaction {
    pub fn initiator(&self) -> &ComponentId {
        &self.path[0]
    }

    pub fn target(&self) -> &ComponentId {
        self.path.last().expect("transaction path is non-empty")
    }

    /// "app.name", unique across the platform.
    pub fn qualified_name(&self) -> String {
        format!("{}.{}", self.app, self.name)
    }

    pub fn has_demand(&self) -> bool {
        self.rate > 0 && self.payload > 0
    }

    /// Bytes per second, exact.
    pub fn demand(&self) -> u128 {
        self.rate as u128 * self.payload as u128
    }
}

/// Worst-case access expansion parameters for a tightly coupled
/// accelerator: elementary access width, address alignment, and the size
/// of the memory line individual bus transactions are bounded by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpansionRule {
    pub width: u64,
    pub alignment: u64,
    pub line: u64,
}

/// All simple directed paths from `from` (an initiator) to `to` (a target)
/// whose interior components are transporters, in lexicographic order.
/// Unreachable pairs yield an empty list.
pub fn enumerate_paths(
    p: &FlatPlatform,
    from: &ComponentId,
    to: &ComponentId,
) -> Result<Vec<Vec<ComponentId>>, AnalysisError> {
    let start = p
        .component(from)
        .ok_or_else(|| AnalysisError::UnknownComponent(from.clone()))?;
    let end = p
        .component(to)
        .ok_or_else(|| AnalysisError::UnknownComponent(to.clone()))?;
    if start.role != Role::Initiator {
        return Err(AnalysisError::Role {
            id: from.clone(),
            expected: "initiator",
            actual: start.role.as_str(),
        });
    }
    if end.role != Role::Target {
        return Err(AnalysisError::Role {
            id: to.clone(),
            expected: "target",
            actual: end.role.as_str(),
        });
    }

    let mut paths = Vec::new();
    let mut current = vec![from.clone()];
    walk(p, to, &mut current, &mut paths);
    // Successor lists are sorted, so the DFS emits paths lexicographically.
    Ok(paths)
}

fn walk(
    p: &FlatPlatform,
    to: &ComponentId,
    current: &mut Vec<ComponentId>,
    out: &mut Vec<Vec<ComponentId>>,
) {
    let last = current.last().expect("path is non-empty").clone();
    for next in p.successors(&last).expect("nodes on a path exist") {
        if next == to {
            let mut path = current.clone();
            path.push(next.clone());
            out.push(path);
            continue;
        }
        if current.contains(next) {
            continue;
        }
        // Interior hops must be transporters.
        if p.component(next).map(|c| c.role) != Some(Role::Transporter) {
            continue;
        }
        current.push(next.clone());
        walk(p, to, current, out);
        current.pop();
    }
}

/// Check every declared transaction against the path invariants: the head
/// is an initiator, the tail a target exposing the service, interior hops
/// are transporters, and each consecutive pair is a declared link.
/// Diagnostics pinpoint the first invalid hop or the missing service.
pub fn resolve_transactions(p: &Platform) -> Result<Vec<Transaction>, Vec<Diagnostic>> {
    let flat = match flatten(p) {
        Ok(flat) => flat,
        Err(AnalysisError::NotValidated(diags)) => return Err(diags),
        Err(other) => {
            return Err(vec![Diagnostic::new(
                DiagCode::BadPath,
                other.to_string(),
                SourceSpan::synthetic(&p.name),
            )])
        }
    };

    let mut resolved = Vec::new();
    let mut diags = Vec::new();
    for app in &p.applications {
        for t in &app.transactions {
            match check_transaction(&flat, t) {
                Ok(()) => resolved.push(t.clone()),
                Err(d) => diags.push(d),
            }
        }
    }
    if diags.is_empty() {
        resolved.sort_by(|a, b| (&a.app, &a.name).cmp(&(&b.app, &b.name)));
        Ok(resolved)
    } else {
        Err(diags)
    }
}

fn check_transaction(flat: &FlatPlatform, t: &Transaction) -> Result<(), Diagnostic> {
    let span = SourceSpan::synthetic(&flat.name);
    let loc = t.qualified_name();
    if t.path.len() < 2 {
        return Err(Diagnostic::new(
            DiagCode::BadPath,
            format!("transaction `{loc}` needs at least an initiator and a target"),
            span,
        ));
    }
    for (pos, hop) in t.path.iter().enumerate() {
        let c = flat.component(hop).ok_or_else(|| {
            Diagnostic::new(
                DiagCode::UnknownComponent,
                format!("transaction `{loc}` references `{hop}`"),
                span.clone(),
            )
        })?;
        let expected = if pos == 0 {
            Role::Initiator
        } else if pos == t.path.len() - 1 {
            Role::Target
        } else {
            Role::Transporter
        };
        if c.role != expected {
            return Err(Diagnostic::new(
                DiagCode::Role,
                format!(
                    "transaction `{loc}`: `{hop}` is a {}, expected {}",
                    c.role.as_str(),
                    expected.as_str()
                ),
                span.clone(),
            ));
        }
    }
    for pair in t.path.windows(2) {
        if !flat.has_link(&pair[0], &pair[1]) {
            return Err(Diagnostic::new(
                DiagCode::BadPath,
                format!(
                    "transaction `{loc}`: no link {} -> {}",
                    pair[0], pair[1]
                ),
                span.clone(),
            ));
        }
    }
    let target = flat.component(t.path.last().unwrap()).unwrap();
    if !target.services.contains(&t.service) {
        return Err(Diagnostic::new(
            DiagCode::NoService,
            format!(
                "transaction `{loc}`: target `{}` does not expose `{}`",
                target.id, t.service
            ),
            span,
        ));
    }
    Ok(())
}

/// Warn for every transaction whose declared path is not the only route
/// between its endpoints. Undeclared routes are candidate interference the
/// model author must acknowledge.
pub fn route_exhaustiveness(p: &Platform) -> Vec<Diagnostic> {
    let flat = match flatten(p) {
        Ok(flat) => flat,
        Err(_) => return Vec::new(),
    };
    let mut warnings = Vec::new();
    for app in &p.applications {
        for t in &app.transactions {
            let Ok(paths) = enumerate_paths(&flat, t.initiator(), t.target()) else {
                continue;
            };
            if paths.len() > 1 {
                warnings.push(Diagnostic::new(
                    DiagCode::UndeclaredRoute,
                    format!(
                        "transaction `{}`: {} routes exist between `{}` and `{}`; \
                         the {} undeclared one(s) are candidate interference",
                        t.qualified_name(),
                        paths.len(),
                        t.initiator(),
                        t.target(),
                        paths.len() - 1
                    ),
                    SourceSpan::synthetic(&p.name),
                ));
            }
        }
    }
    warnings
}

/// Split a transaction's payload into the worst-case number of line-sized
/// sub-transactions. With the most hostile legal start offset
/// (`line - alignment mod line`), a payload of `P` bytes touches
/// `ceil((P + offset) / line)` lines; each sub-transaction carries the
/// bytes falling into one line window, so payload is conserved and the
/// path head (the initiating core) is unchanged.
pub fn expand_access(
    t: &Transaction,
    rule: &ExpansionRule,
) -> Result<Vec<Transaction>, AnalysisError> {
    if rule.width == 0 || rule.alignment == 0 || rule.line == 0 {
        return Err(AnalysisError::BadRule(
            "width, alignment, and line must be positive".into(),
        ));
    }
    if t.payload == 0 {
        return Err(AnalysisError::BadRule(format!(
            "transaction `{}` has no payload to expand",
            t.qualified_name()
        )));
    }

    let offset = worst_offset(rule);
    let count = (t.payload + offset).div_ceil(rule.line);
    let mut parts = Vec::with_capacity(count as usize);
    let mut remaining = t.payload;
    // First window is shortened by the misalignment offset.
    let mut window = rule.line - offset;
    let mut index = 0u64;
    while remaining > 0 {
        let chunk = remaining.min(window);
        parts.push(Transaction {
            name: format!("{}_{}", t.name, index),
            payload: chunk,
            ..t.clone()
        });
        remaining -= chunk;
        window = rule.line;
        index += 1;
    }
    debug_assert_eq!(parts.len() as u64, count);
    Ok(parts)
}

/// The largest start offset, within a line, of an access aligned to
/// `rule.alignment`: the offsets reachable by aligned accesses are the
/// multiples of gcd(alignment, line), so the worst is `line - gcd`.
pub fn worst_offset(rule: &ExpansionRule) -> u64 {
    rule.line - gcd(rule.alignment, rule.line)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Component;

    fn chain() -> Platform {
        let mut p = Platform::new("chain")
            .with_component(Component::initiator("C0"))
            .with_component(Component::transporter("BUS"))
            .with_component(
                Component::target("DDR")
                    .with_service("load")
                    .with_service("store"),
            )
            .with_link("C0", "BUS")
            .with_link("BUS", "DDR");
        p.applications.push(Application::new("a"));
        p
    }

    fn txn(path: &[&str], service: &str) -> Transaction {
        Transaction {
            app: "a".into(),
            name: "t".into(),
            path: path.iter().map(|s| ComponentId::new(*s)).collect(),
            service: ServiceKind::new(service),
            rate: 0,
            payload: 0,
        }
    }

    #[test]
    fn unique_path_on_chain() {
        let flat = flatten(&chain()).unwrap();
        let paths = enumerate_paths(&flat, &"C0".into(), &"DDR".into()).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].len(), 3);
    }

    #[test]
    fn diamond_has_two_paths() {
        let p = Platform::new("d")
            .with_component(Component::initiator("C0"))
            .with_component(Component::transporter("B1"))
            .with_component(Component::transporter("B2"))
            .with_component(Component::target("DDR").with_service("load"))
            .with_link("C0", "B1")
            .with_link("C0", "B2")
            .with_link("B1", "DDR")
            .with_link("B2", "DDR");
        let flat = flatten(&p).unwrap();
        let paths = enumerate_paths(&flat, &"C0".into(), &"DDR".into()).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths[0] < paths[1], "paths are ordered");
    }

    #[test]
    fn wrong_roles_rejected() {
        let flat = flatten(&chain()).unwrap();
        assert!(matches!(
            enumerate_paths(&flat, &"BUS".into(), &"DDR".into()),
            Err(AnalysisError::Role { .. })
        ));
        assert!(matches!(
            enumerate_paths(&flat, &"C0".into(), &"NOPE".into()),
            Err(AnalysisError::UnknownComponent(_))
        ));
    }

    #[test]
    fn resolve_accepts_declared_path() {
        let mut p = chain();
        p.applications[0]
            .transactions
            .push(txn(&["C0", "BUS", "DDR"], "load"));
        let resolved = resolve_transactions(&p).unwrap();
        assert_eq!(resolved.len(), 1);
    }

    #[test]
    fn resolve_rejects_missing_hop() {
        let mut p = chain();
        p.applications[0].transactions.push(txn(&["C0", "DDR"], "load"));
        let diags = resolve_transactions(&p).unwrap_err();
        assert_eq!(diags[0].code, DiagCode::BadPath);
        assert!(diags[0].message.contains("C0 -> DDR"));
    }

    #[test]
    fn resolve_rejects_missing_service() {
        let mut p = chain();
        p.applications[0]
            .transactions
            .push(txn(&["C0", "BUS", "DDR"], "config"));
        let diags = resolve_transactions(&p).unwrap_err();
        assert_eq!(diags[0].code, DiagCode::NoService);
    }

    #[test]
    fn resolve_rejects_interior_non_transporter() {
        let mut p = chain()
            .with_component(Component::target("SRAM").with_service("load"))
            .with_link("C0", "SRAM")
            .with_link("SRAM", "DDR");
        p.applications[0]
            .transactions
            .push(txn(&["C0", "SRAM", "DDR"], "load"));
        let diags = resolve_transactions(&p).unwrap_err();
        assert_eq!(diags[0].code, DiagCode::Role);
    }

    #[test]
    fn aligned_small_payload_is_single() {
        let mut t = txn(&["C0", "BUS", "DDR"], "load");
        t.payload = 16;
        let rule = ExpansionRule {
            width: 16,
            alignment: 64,
            line: 64,
        };
        let parts = expand_access(&t, &rule).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].payload, 16);
    }

    #[test]
    fn worst_misalignment_splits_line_sized_payload() {
        let mut t = txn(&["C0", "BUS", "DDR"], "load");
        t.payload = 64;
        let rule = ExpansionRule {
            width: 16,
            alignment: 32,
            line: 64,
        };
        let parts = expand_access(&t, &rule).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts.iter().map(|p| p.payload).sum::<u64>(), 64);
        assert!(parts.iter().all(|p| p.path == t.path));
    }

    #[test]
    fn zero_payload_is_bad_rule() {
        let t = txn(&["C0", "BUS", "DDR"], "load");
        let rule = ExpansionRule {
            width: 16,
            alignment: 64,
            line: 64,
        };
        assert!(matches!(
            expand_access(&t, &rule),
            Err(AnalysisError::BadRule(_))
        ));
    }

    #[test]
    fn route_warning_on_diamond() {
        let mut p = Platform::new("d")
            .with_component(Component::initiator("C0"))
            .with_component(Component::transporter("B1"))
            .with_component(Component::transporter("B2"))
            .with_component(Component::target("DDR").with_service("load"))
            .with_link("C0", "B1")
            .with_link("C0", "B2")
            .with_link("B1", "DDR")
            .with_link("B2", "DDR");
        let mut app = Application::new("a");
        app.transactions.push(txn(&["C0", "B1", "DDR"], "load"));
        p.applications.push(app);
        let warnings = route_exhaustiveness(&p);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].code, DiagCode::UndeclaredRoute);
    }
}
