//! The interference calculus.
//!
//! A scenario is a set of transactions that can be in flight at the same
//! time: at most one per initiator and, unless the caller opts out, at
//! most one per application. Classification is by shared components:
//!
//! * `itf`: every member's path crosses a common component; that common
//!   set is the interference channel,
//! * `free`: all pairwise path intersections are empty,
//! * `partial`: some but not all members overlap.
//!
//! For pairs (the primary certification view) `itf` and `free` are
//! exhaustive; `partial` only appears for three or more transactions.
//!
//! Declared symmetry classes, once machine-validated as automorphisms,
//! quotient the scenario space: scenarios that differ only by a
//! relabeling of interchangeable components form one orbit and classify
//! identically, so a report need only show one representative per orbit
//! together with the orbit size.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::diag::{DiagCode, Diagnostic, SourceSpan};
use crate::error::AnalysisError;
use crate::model::{flatten, ComponentId, FlatPlatform, Platform, SymmetryClass};
use crate::parallel;
use crate::txn::Transaction;

/// Enumeration options. The default excludes same-application pairs:
/// threads of one application are not considered as interfering with each
/// other, only with other applications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScenarioOptions {
    pub include_same_app: bool,
}

/// A set of `n >= 2` concurrent transactions with pairwise distinct
/// initiators, kept sorted by (app, name) for deterministic ordering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Scenario {
    transactions: Vec<Transaction>,
}

impl Scenario {
    /// Build a scenario, enforcing the invariants. Returns `None` when the
    /// transaction set is too small, shares an initiator, or (without
    /// `include_same_app`) shares an owning application.
    pub fn new(mut transactions: Vec<Transaction>, opts: ScenarioOptions) -> Option<Self> {
        if transactions.len() < 2 {
            return None;
        }
        transactions.sort_by(|a, b| (&a.app, &a.name).cmp(&(&b.app, &b.name)));
        let initiators: BTreeSet<_> = transactions.iter().map(|t| t.initiator()).collect();
        if initiators.len() != transactions.len() {
            return None;
        }
        if !opts.include_same_app {
            let apps: BTreeSet<_> = transactions.iter().map(|t| &t.app).collect();
            if apps.len() != transactions.len() {
                return None;
            }
        }
        Some(Scenario { transactions })
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Qualified transaction names, e.g. for report subjects.
    pub fn member_names(&self) -> Vec<String> {
        self.transactions.iter().map(|t| t.qualified_name()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Itf,
    Free,
    Partial,
}

/// The verdict for one scenario. `channel` is non-empty exactly for `itf`
/// and then holds the components common to every member path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: ScenarioKind,
    pub channel: BTreeSet<ComponentId>,
}

/// An equivalence class of scenarios under the validated symmetry group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub representative: Scenario,
    pub size: usize,
}

/// All size-`n` scenarios of the platform in deterministic (lexicographic)
/// order. Sizes below 2 are an error; a size larger than the number of
/// transaction-carrying initiators simply yields no scenarios.
pub fn scenarios(
    p: &Platform,
    n: usize,
    opts: ScenarioOptions,
) -> Result<Vec<Scenario>, AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::BadN(n));
    }
    let all: Vec<Transaction> = p.transactions().into_iter().cloned().collect();
    let mut out = Vec::new();
    let mut picked: Vec<usize> = Vec::with_capacity(n);
    choose(&all, n, 0, &mut picked, opts, &mut out);
    Ok(out)
}

fn choose(
    all: &[Transaction],
    n: usize,
    start: usize,
    picked: &mut Vec<usize>,
    opts: ScenarioOptions,
    out: &mut Vec<Scenario>,
) {
    if picked.len() == n {
        let txns: Vec<Transaction> = picked.iter().map(|&i| all[i].clone()).collect();
        if let Some(s) = Scenario::new(txns, opts) {
            out.push(s);
        }
        return;
    }
    let remaining = n - picked.len();
    for i in start..all.len() {
        if all.len() - i < remaining {
            break;
        }
        // Prune combinations that already violate the invariants.
        let candidate = &all[i];
        let compatible = picked.iter().all(|&j| {
            let prev = &all[j];
            prev.initiator() != candidate.initiator()
                && (opts.include_same_app || prev.app != candidate.app)
        });
        if !compatible {
            continue;
        }
        picked.push(i);
        choose(all, n, i + 1, picked, opts, out);
        picked.pop();
    }
}

/// Classify one scenario by the set algebra of its member paths.
pub fn classify(s: &Scenario) -> Classification {
    let sets: Vec<BTreeSet<&ComponentId>> = s
        .transactions
        .iter()
        .map(|t| t.path.iter().collect())
        .collect();

    let mut common = sets[0].clone();
    for set in &sets[1..] {
        common = common.intersection(set).cloned().collect();
    }
    if !common.is_empty() {
        return Classification {
            kind: ScenarioKind::Itf,
            channel: common.into_iter().cloned().collect(),
        };
    }

    let disjoint = (0..sets.len()).all(|i| {
        (i + 1..sets.len()).all(|j| sets[i].intersection(&sets[j]).next().is_none())
    });
    Classification {
        kind: if disjoint {
            ScenarioKind::Free
        } else {
            ScenarioKind::Partial
        },
        channel: BTreeSet::new(),
    }
}

/// Classify many scenarios at once. Runs data-parallel when the `parallel`
/// feature is enabled; the output order matches the input either way.
pub fn classify_batch(scenarios: &[Scenario]) -> Vec<Classification> {
    parallel::map_collect(scenarios, classify)
}

/// For every component, the itf scenarios of size `2..=n_max` whose
/// channel contains it. Components that never appear in a channel are
/// omitted.
pub fn channels(
    p: &Platform,
    n_max: usize,
    opts: ScenarioOptions,
) -> Result<BTreeMap<ComponentId, Vec<Scenario>>, AnalysisError> {
    if n_max < 2 {
        return Err(AnalysisError::BadN(n_max));
    }
    let initiators: BTreeSet<_> = p
        .transactions()
        .iter()
        .map(|t| t.initiator().clone())
        .collect();
    let mut map: BTreeMap<ComponentId, Vec<Scenario>> = BTreeMap::new();
    for n in 2..=n_max.min(initiators.len()) {
        let scs = scenarios(p, n, opts)?;
        let verdicts = classify_batch(&scs);
        for (s, c) in scs.into_iter().zip(verdicts) {
            if c.kind == ScenarioKind::Itf {
                for comp in &c.channel {
                    map.entry(comp.clone()).or_default().push(s.clone());
                }
            }
        }
    }
    Ok(map)
}

/// Check that a declared symmetry class is automorphism-inducing: for
/// every pair of members, swapping the two (and fixing everything else)
/// must map the link set onto itself and the members must agree on role,
/// services, and capacity. The first violated link or attribute is named
/// in the diagnostic.
pub fn validate_symmetry(p: &FlatPlatform, sc: &SymmetryClass) -> Result<(), Vec<Diagnostic>> {
    let span = SourceSpan::synthetic(&p.name);
    let mut diags = Vec::new();

    if sc.members.len() < 2 {
        diags.push(Diagnostic::new(
            DiagCode::SymmetryClass,
            format!("symmetry class `{}` needs at least 2 members", sc.name),
            span.clone(),
        ));
    }
    let mut members = Vec::new();
    for m in &sc.members {
        match p.component(m) {
            Some(c) => members.push(c),
            None => diags.push(Diagnostic::new(
                DiagCode::UnknownComponent,
                format!("symmetry class `{}` member `{m}` does not exist", sc.name),
                span.clone(),
            )),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let (a, b) = (members[i], members[j]);
            if a.role != b.role {
                diags.push(Diagnostic::new(
                    DiagCode::NotSymmetric,
                    format!(
                        "`{}` is a {} but `{}` is a {}",
                        a.id,
                        a.role.as_str(),
                        b.id,
                        b.role.as_str()
                    ),
                    span.clone(),
                ));
                continue;
            }
            if a.services != b.services {
                diags.push(Diagnostic::new(
                    DiagCode::NotSymmetric,
                    format!("`{}` and `{}` expose different services", a.id, b.id),
                    span.clone(),
                ));
                continue;
            }
            if a.capacity != b.capacity {
                diags.push(Diagnostic::new(
                    DiagCode::NotSymmetric,
                    format!("`{}` and `{}` declare different capacities", a.id, b.id),
                    span.clone(),
                ));
                continue;
            }
            if let Some(witness) = transposition_witness(p, &a.id, &b.id) {
                diags.push(Diagnostic::new(
                    DiagCode::NotSymmetric,
                    format!(
                        "swapping `{}` and `{}` breaks link {} -> {}",
                        a.id, b.id, witness.0, witness.1
                    ),
                    span.clone(),
                ));
            }
        }
    }

    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

/// First link whose image under the (a b) transposition is not a link.
fn transposition_witness(
    p: &FlatPlatform,
    a: &ComponentId,
    b: &ComponentId,
) -> Option<(ComponentId, ComponentId)> {
    let swap = |id: &ComponentId| -> ComponentId {
        if id == a {
            b.clone()
        } else if id == b {
            a.clone()
        } else {
            id.clone()
        }
    };
    for (from, to) in p.links() {
        if from != a && from != b && to != a && to != b {
            continue;
        }
        let image = (swap(from), swap(to));
        if !p.has_link(&image.0, &image.1) {
            return Some((from.clone(), to.clone()));
        }
    }
    None
}

/// Partition scenarios into orbits under the group generated by the
/// platform's validated symmetry classes. Orbit sizes sum to the input
/// length; the representative is the lexicographically least member.
/// Fails with `E_UNVALIDATED_SYMMETRY` when any declared class does not
/// validate.
pub fn quotient(p: &Platform, scs: &[Scenario]) -> Result<Vec<Orbit>, AnalysisError> {
    let flat = flatten(p)?;
    for sc in &p.symmetries {
        if let Err(diags) = validate_symmetry(&flat, sc) {
            return Err(AnalysisError::UnvalidatedSymmetry {
                class: sc.name.clone(),
                detail: diags
                    .first()
                    .map(|d| d.message.clone())
                    .unwrap_or_default(),
            });
        }
    }

    let keys = parallel::map_collect(scs, |s| canonical_key(s, &p.symmetries));
    let mut orbits: BTreeMap<Vec<FootprintKey>, (Scenario, usize)> = BTreeMap::new();
    for (s, key) in scs.iter().zip(keys) {
        orbits
            .entry(key)
            .and_modify(|(rep, size)| {
                *size += 1;
                if s < rep {
                    *rep = s.clone();
                }
            })
            .or_insert_with(|| (s.clone(), 1));
    }

    let mut out: Vec<Orbit> = orbits
        .into_values()
        .map(|(representative, size)| Orbit {
            representative,
            size,
        })
        .collect();
    out.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(out)
}

/// The relabeling-invariant footprint of one transaction: symmetry acts
/// on component ids only, so names and owning applications are dropped.
type FootprintKey = (ServiceRate, Vec<ComponentId>);
type ServiceRate = (String, u64, u64);

/// Least footprint multiset over all relabelings of class members. Two
/// scenarios share a key exactly when some product of class permutations
/// maps one onto the other (ignoring transaction identity).
fn canonical_key(s: &Scenario, classes: &[SymmetryClass]) -> Vec<FootprintKey> {
    // Per class, the members that occur in this scenario's paths.
    let used: BTreeSet<ComponentId> = s
        .transactions()
        .iter()
        .flat_map(|t| t.path.iter().cloned())
        .collect();

    let mut per_class: Vec<(Vec<ComponentId>, Vec<ComponentId>)> = Vec::new();
    for c in classes {
        let present: Vec<ComponentId> = c
            .members
            .iter()
            .filter(|m| used.contains(*m))
            .cloned()
            .collect();
        if !present.is_empty() {
            per_class.push((present, c.members.clone()));
        }
    }

    let mut best: Option<Vec<FootprintKey>> = None;
    let mut relabel: BTreeMap<ComponentId, ComponentId> = BTreeMap::new();
    minimize(s, &per_class, 0, &mut relabel, &mut best);
    best.unwrap_or_else(|| footprint(s, &BTreeMap::new()))
}

/// Enumerate injective assignments of present members into their class,
/// one class at a time, and keep the least footprint.
fn minimize(
    s: &Scenario,
    per_class: &[(Vec<ComponentId>, Vec<ComponentId>)],
    depth: usize,
    relabel: &mut BTreeMap<ComponentId, ComponentId>,
    best: &mut Option<Vec<FootprintKey>>,
) {
    if depth == per_class.len() {
        let candidate = footprint(s, relabel);
        if best.as_ref().is_none_or(|b| candidate < *b) {
            *best = Some(candidate);
        }
        return;
    }
    let (present, members) = &per_class[depth];
    let mut chosen: Vec<ComponentId> = Vec::with_capacity(present.len());
    assign(s, per_class, depth, present, members, 0, &mut chosen, relabel, best);
}

#[allow(clippy::too_many_arguments)]
fn assign(
    s: &Scenario,
    per_class: &[(Vec<ComponentId>, Vec<ComponentId>)],
    depth: usize,
    present: &[ComponentId],
    members: &[ComponentId],
    pos: usize,
    chosen: &mut Vec<ComponentId>,
    relabel: &mut BTreeMap<ComponentId, ComponentId>,
    best: &mut Option<Vec<FootprintKey>>,
) {
    if pos == present.len() {
        minimize(s, per_class, depth + 1, relabel, best);
        return;
    }
    for m in members {
        if chosen.contains(m) {
            continue;
        }
        chosen.push(m.clone());
        relabel.insert(present[pos].clone(), m.clone());
        assign(s, per_class, depth, present, members, pos + 1, chosen, relabel, best);
        relabel.remove(&present[pos]);
        chosen.pop();
    }
}

fn footprint(s: &Scenario, relabel: &BTreeMap<ComponentId, ComponentId>) -> Vec<FootprintKey> {
    let mut keys: Vec<FootprintKey> = s
        .transactions()
        .iter()
        .map(|t| {
            let path: Vec<ComponentId> = t
                .path
                .iter()
                .map(|c| relabel.get(c).cloned().unwrap_or_else(|| c.clone()))
                .collect();
            ((t.service.as_str().to_string(), t.rate, t.payload), path)
        })
        .collect();
    keys.sort();
    keys
}
