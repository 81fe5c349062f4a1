//! Report generation: structured findings with certification-objective
//! tags, a versioned JSON document, and DOT graph export.
//!
//! Reports are deterministic: the same platform and options produce
//! byte-identical JSON, and finding ids are content hashes, stable across
//! regenerations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::capacity::check_capacity;
use crate::error::AnalysisError;
use crate::interference::{
    classify_batch, quotient, scenarios, Orbit, Scenario, ScenarioKind, ScenarioOptions,
};
use crate::model::{flatten, Complexity, Component, ComponentId, Platform, Role};
use crate::txn::resolve_transactions;

pub const SCHEMA: &str = "itfkit/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    ItfChannel,
    FreePair,
    Partial,
    Capacity,
    AbstractionWarning,
    UnitaryViolation,
    ClassificationNote,
}

impl FindingKind {
    pub fn slug(self) -> &'static str {
        match self {
            FindingKind::ItfChannel => "itf_channel",
            FindingKind::FreePair => "free_pair",
            FindingKind::Partial => "partial",
            FindingKind::Capacity => "capacity",
            FindingKind::AbstractionWarning => "abstraction_warning",
            FindingKind::UnitaryViolation => "unitary_violation",
            FindingKind::ClassificationNote => "classification_note",
        }
    }
}

/// Tags linking findings to the certification planning objectives they
/// support: shared-resource identification, interference channels,
/// capacity, software identification, usage-domain compliance, microcode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum AmcTag {
    #[serde(rename = "RESOURCE_ID")]
    ResourceId,
    #[serde(rename = "CHANNEL_ID")]
    ChannelId,
    #[serde(rename = "CAPACITY")]
    Capacity,
    #[serde(rename = "SOFTWARE_ID")]
    SoftwareId,
    #[serde(rename = "USAGE_DOMAIN")]
    UsageDomain,
    #[serde(rename = "MICROCODE")]
    Microcode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub id: String,
    pub kind: FindingKind,
    pub subject: String,
    pub amc_tags: Vec<AmcTag>,
    pub details: Value,
}

impl Finding {
    fn new(kind: FindingKind, subject: String, amc_tags: Vec<AmcTag>, details: Value) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(kind.slug().as_bytes());
        hasher.update(b"\0");
        hasher.update(subject.as_bytes());
        hasher.update(b"\0");
        hasher.update(details.to_string().as_bytes());
        let digest = hasher.finalize();
        let mut id = format!("{}-", kind.slug());
        for byte in digest.iter().take(6) {
            let _ = write!(id, "{byte:02x}");
        }
        Finding {
            id,
            kind,
            subject,
            amc_tags,
            details,
        }
    }

    /// Error findings fail a CI run; the rest are informative.
    pub fn is_error(&self) -> bool {
        match self.kind {
            FindingKind::UnitaryViolation => true,
            FindingKind::Capacity => {
                self.details.get("verdict").and_then(Value::as_str) == Some("over")
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlatformSummary {
    pub name: String,
    pub initiators: usize,
    pub targets: usize,
    pub transporters: usize,
    pub applications: usize,
    pub transactions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: String,
    pub platform: PlatformSummary,
    pub assumptions: Vec<String>,
    pub findings: Vec<Finding>,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(Finding::is_error)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    /// Largest scenario size to enumerate.
    pub n_max: usize,
    pub include_same_app: bool,
    /// Collapse symmetric scenarios into orbits.
    pub quotient: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            n_max: 2,
            include_same_app: false,
            quotient: true,
        }
    }
}

impl ReportOptions {
    fn scenario_options(&self) -> ScenarioOptions {
        ScenarioOptions {
            include_same_app: self.include_same_app,
        }
    }
}

/// Build the full analysis report: interference channels (quotiented when
/// symmetries are declared), partial scenarios, capacity verdicts,
/// abstraction warnings, and classification notes.
pub fn build_report(p: &Platform, opts: &ReportOptions) -> Result<Report, AnalysisError> {
    if opts.n_max < 2 {
        return Err(AnalysisError::BadN(opts.n_max));
    }
    let flat = flatten(p)?;
    resolve_transactions(p).map_err(AnalysisError::NotValidated)?;

    let mut findings = Vec::new();
    findings.extend(scenario_findings_filtered(p, opts, false)?);

    // Capacity verdicts, one per component carrying traffic.
    for entry in check_capacity(p)?.entries {
        findings.push(Finding::new(
            FindingKind::Capacity,
            entry.demand.component.to_string(),
            vec![AmcTag::Capacity, AmcTag::ResourceId],
            json!({
                "bytes_per_second": entry.demand.bytes_per_second.to_string(),
                "capacity": entry.capacity,
                "verdict": entry.verdict.as_str(),
                "contributors": entry.demand.contributors
                    .iter()
                    .map(|(name, bps)| json!({"transaction": name, "bytes_per_second": bps.to_string()}))
                    .collect::<Vec<_>>(),
                "unspecified": entry.demand.unspecified,
            }),
        ));
    }

    // Complex devices abstracted as single targets: their internal
    // transactions are assumed non-interfering, which must be verified.
    for c in flat.components() {
        if c.role == Role::Target {
            if let Some(cls) = &c.classification {
                if cls.complexity == Complexity::Complex {
                    findings.push(Finding::new(
                        FindingKind::AbstractionWarning,
                        c.id.to_string(),
                        vec![AmcTag::ResourceId, AmcTag::UsageDomain],
                        json!({
                            "code": "W_ABSTRACTION",
                            "note": "complex device abstracted as a single target; \
                                     internal transactions are assumed non-interfering \
                                     with external ones and must be verified",
                        }),
                    ));
                }
            }
        }
    }

    // Classification metadata, surfaced for the device assessment.
    for c in flat.components() {
        if let Some(cls) = &c.classification {
            findings.push(Finding::new(
                FindingKind::ClassificationNote,
                c.id.to_string(),
                vec![AmcTag::ResourceId, AmcTag::UsageDomain],
                json!({
                    "origin": cls.origin.keyword(),
                    "complexity": cls.complexity.keyword(),
                    "notes": cls.notes,
                }),
            ));
        }
    }

    // Microcode is platform behavior modeled as transactions under the
    // reserved application name.
    for app in &p.applications {
        if app.name.starts_with("__microcode__") {
            findings.push(Finding::new(
                FindingKind::ClassificationNote,
                app.name.clone(),
                vec![AmcTag::SoftwareId, AmcTag::Microcode],
                json!({
                    "note": "microcode modeled as platform-owned transactions",
                    "transactions": app.transactions.iter().map(|t| t.qualified_name()).collect::<Vec<_>>(),
                }),
            ));
        }
    }

    findings.sort_by(|a, b| {
        (a.kind, &a.subject, a.details.to_string()).cmp(&(b.kind, &b.subject, b.details.to_string()))
    });

    Ok(Report {
        schema: SCHEMA.to_string(),
        platform: summarize(p, &flat)?,
        assumptions: assumptions(p, opts),
        findings,
    })
}

/// Findings for every scenario classification, including free pairs.
/// Used by the `interfere` command; `build_report` keeps only itf and
/// partial entries.
pub fn scenario_findings(
    p: &Platform,
    opts: &ReportOptions,
) -> Result<Vec<Finding>, AnalysisError> {
    scenario_findings_filtered(p, opts, true)
}

fn scenario_findings_filtered(
    p: &Platform,
    opts: &ReportOptions,
    include_free: bool,
) -> Result<Vec<Finding>, AnalysisError> {
    if opts.n_max < 2 {
        return Err(AnalysisError::BadN(opts.n_max));
    }
    let initiators: std::collections::BTreeSet<ComponentId> = p
        .transactions()
        .iter()
        .map(|t| t.initiator().clone())
        .collect();
    let apply_quotient = opts.quotient && !p.symmetries.is_empty();

    let mut findings = Vec::new();
    for n in 2..=opts.n_max.min(initiators.len().max(2)) {
        let scs = scenarios(p, n, opts.scenario_options())?;
        if scs.is_empty() {
            continue;
        }
        let orbits: Vec<Orbit> = if apply_quotient {
            quotient(p, &scs)?
        } else {
            scs.iter()
                .map(|s| Orbit {
                    representative: s.clone(),
                    size: 1,
                })
                .collect()
        };
        let reps: Vec<Scenario> = orbits.iter().map(|o| o.representative.clone()).collect();
        let verdicts = classify_batch(&reps);
        for (orbit, classification) in orbits.iter().zip(verdicts) {
            let (kind, tags) = match classification.kind {
                ScenarioKind::Itf => (FindingKind::ItfChannel, vec![AmcTag::ChannelId, AmcTag::ResourceId]),
                ScenarioKind::Partial => (FindingKind::Partial, vec![AmcTag::ChannelId]),
                ScenarioKind::Free => {
                    if !include_free {
                        continue;
                    }
                    (FindingKind::FreePair, vec![AmcTag::ChannelId])
                }
            };
            let members = orbit.representative.member_names();
            findings.push(Finding::new(
                kind,
                members.join(" | "),
                tags,
                json!({
                    "scenario_size": n,
                    "members": members,
                    "channel": classification.channel.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "orbit_size": orbit.size,
                    "quotiented": apply_quotient,
                }),
            ));
        }
    }
    Ok(findings)
}

fn summarize(p: &Platform, flat: &crate::model::FlatPlatform) -> Result<PlatformSummary, AnalysisError> {
    Ok(PlatformSummary {
        name: p.name.clone(),
        initiators: flat.components_with_role(Role::Initiator).count(),
        targets: flat.components_with_role(Role::Target).count(),
        transporters: flat.components_with_role(Role::Transporter).count(),
        applications: p.applications.len(),
        transactions: p.transactions().len(),
    })
}

fn assumptions(p: &Platform, opts: &ReportOptions) -> Vec<String> {
    let mut out = vec![
        "capacity verdicts are an average-demand check (sustained rate x payload); \
         instantaneous demand may exceed the average"
            .to_string(),
        format!(
            "scenarios enumerate sizes 2..={} with at most one transaction in flight per initiator",
            opts.n_max
        ),
        if opts.include_same_app {
            "transactions of the same application are treated as potentially concurrent".to_string()
        } else {
            "transactions of the same application are not considered as interfering \
             with each other"
                .to_string()
        },
    ];
    if p.symmetries.is_empty() || !opts.quotient {
        out.push("no symmetry quotient applied; every scenario reported individually".to_string());
    } else {
        for sc in &p.symmetries {
            out.push(format!(
                "symmetry class `{}` declares {} interchangeable components \
                 (the decomposition granularity is a modeling choice)",
                sc.name,
                sc.members.len()
            ));
        }
    }
    out
}

/// Pretty-print a report as JSON with sorted keys and a trailing newline.
pub fn report_json(report: &Report) -> String {
    let value = serde_json::to_value(report).expect("report serializes");
    let mut text = serde_json::to_string_pretty(&value).expect("value prints");
    text.push('\n');
    text
}

/// Render the platform as a DOT digraph. Initiators are boxes, targets
/// ellipses, transporters diamonds; composites become clusters. When a
/// finding is given, its channel components are filled.
pub fn export_dot(p: &Platform, highlight: Option<&Finding>) -> Result<String, AnalysisError> {
    flatten(p)?;
    let p = p.canonical();

    let mut marked: Vec<String> = Vec::new();
    if let Some(f) = highlight {
        if let Some(channel) = f.details.get("channel").and_then(Value::as_array) {
            marked = channel
                .iter()
                .filter_map(Value::as_str)
                .map(str::to_string)
                .collect();
        } else {
            // Component-subject findings (capacity, abstraction) mark
            // their subject directly.
            marked.push(f.subject.clone());
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", p.name);
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [fontname=\"Helvetica\"];");
    for c in &p.components {
        dot_component(&mut out, c, None, &marked, 1);
    }
    for l in &p.links {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", l.from, l.to);
    }
    let _ = writeln!(out, "}}");
    Ok(out)
}

fn dot_component(
    out: &mut String,
    c: &Component,
    parent: Option<&ComponentId>,
    marked: &[String],
    depth: usize,
) {
    let pad = "  ".repeat(depth);
    let id = match parent {
        Some(p) => p.child(&c.name),
        None => ComponentId::new(c.name.clone()),
    };
    if c.role == Role::Composite {
        let _ = writeln!(out, "{pad}subgraph \"cluster_{id}\" {{");
        let _ = writeln!(out, "{pad}  label=\"{}\";", c.name);
        for child in &c.children {
            dot_component(out, child, Some(&id), marked, depth + 1);
        }
        let _ = writeln!(out, "{pad}}}");
        return;
    }
    let shape = match c.role {
        Role::Initiator => "box",
        Role::Target => "ellipse",
        Role::Transporter => "diamond",
        Role::Composite => unreachable!(),
    };
    let highlight = if marked.iter().any(|m| m == id.as_str()) {
        ", style=filled, fillcolor=orange, penwidth=2"
    } else {
        ""
    };
    let _ = writeln!(out, "{pad}\"{id}\" [shape={shape}{highlight}];");
}

/// Orbit listing for the `interfere` command's human-readable output.
pub fn orbit_lines(p: &Platform, opts: &ReportOptions) -> Result<Vec<String>, AnalysisError> {
    let findings = scenario_findings(p, opts)?;
    let mut lines = Vec::new();
    for f in &findings {
        let channel: Vec<&str> = f
            .details
            .get("channel")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default();
        let orbit_size = f
            .details
            .get("orbit_size")
            .and_then(Value::as_u64)
            .unwrap_or(1);
        let mut line = format!("{:<12} {}", f.kind.slug(), f.subject);
        if !channel.is_empty() {
            let _ = write!(line, "  channel: {{{}}}", channel.join(", "));
        }
        if orbit_size > 1 {
            let _ = write!(line, "  orbit size: {orbit_size}");
        }
        lines.push(line);
    }
    Ok(lines)
}

/// The deterministic map used by the oracle tests: every component with
/// the itf scenarios (not quotiented) whose channel contains it.
pub fn channel_map(
    p: &Platform,
    n_max: usize,
    opts: ScenarioOptions,
) -> Result<BTreeMap<ComponentId, Vec<Scenario>>, AnalysisError> {
    crate::interference::channels(p, n_max, opts)
}
