//! Capacity verification: aggregate transaction demand per shared
//! component and compare it against declared capacities.
//!
//! The demand model is the sustained average, `rate x payload` bytes per
//! second, summed over every transaction whose path crosses a component.
//! Arithmetic is exact (wide integers, no rounding); a sum that would
//! overflow is a hard error rather than a silently wrong verdict.
//! Transactions without a rate or payload cannot be summed; they are
//! excluded and surface as `unspecified_demand` so a pass is never
//! vacuous.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::AnalysisError;
use crate::model::{flatten, ComponentId, Platform, Role};
use crate::txn::resolve_transactions;

/// Aggregated demand on one component, with its contributors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Demand {
    pub component: ComponentId,
    pub bytes_per_second: u128,
    /// (qualified transaction name, bytes per second), sorted by name.
    pub contributors: Vec<(String, u128)>,
    /// Transactions crossing the component whose rate or payload is
    /// unspecified, excluded from the sum.
    pub unspecified: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Over,
    UnspecifiedCapacity,
    UnspecifiedDemand,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Ok => "ok",
            Verdict::Over => "over",
            Verdict::UnspecifiedCapacity => "unspecified_capacity",
            Verdict::UnspecifiedDemand => "unspecified_demand",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapacityEntry {
    pub demand: Demand,
    pub capacity: Option<u64>,
    pub verdict: Verdict,
}

/// One entry per target or transporter traversed by at least one
/// transaction, ordered by component id.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CapacityReport {
    pub entries: Vec<CapacityEntry>,
}

impl CapacityReport {
    pub fn has_overload(&self) -> bool {
        self.entries.iter().any(|e| e.verdict == Verdict::Over)
    }
}

/// Demand on a single target or transporter.
pub fn component_demand(p: &Platform, c: &ComponentId) -> Result<Demand, AnalysisError> {
    let flat = flatten(p)?;
    let comp = flat
        .component(c)
        .ok_or_else(|| AnalysisError::UnknownComponent(c.clone()))?;
    if comp.role == Role::Initiator {
        return Err(AnalysisError::Role {
            id: c.clone(),
            expected: "target or transporter",
            actual: comp.role.as_str(),
        });
    }

    let mut demand = Demand {
        component: c.clone(),
        bytes_per_second: 0,
        contributors: Vec::new(),
        unspecified: Vec::new(),
    };
    for t in p.transactions() {
        if !t.path.contains(c) {
            continue;
        }
        if t.has_demand() {
            let bps = t.demand();
            demand.bytes_per_second = demand
                .bytes_per_second
                .checked_add(bps)
                .ok_or_else(|| AnalysisError::Overflow(c.clone()))?;
            demand.contributors.push((t.qualified_name(), bps));
        } else {
            demand.unspecified.push(t.qualified_name());
        }
    }
    demand.contributors.sort();
    demand.unspecified.sort();
    Ok(demand)
}

/// Demand versus declared capacity for every target and transporter that
/// carries traffic. `over` wins whenever the summed demand already
/// exceeds a declared capacity; otherwise a missing capacity or an
/// unsummable contributor downgrades the verdict to the matching
/// `unspecified` warning.
pub fn check_capacity(p: &Platform) -> Result<CapacityReport, AnalysisError> {
    let flat = flatten(p)?;
    // Transactions must be well-formed before their demand means anything.
    resolve_transactions(p).map_err(AnalysisError::NotValidated)?;

    let mut touched: BTreeMap<ComponentId, ()> = BTreeMap::new();
    for t in p.transactions() {
        for hop in &t.path {
            if flat.component(hop).map(|c| c.role) != Some(Role::Initiator) {
                touched.insert(hop.clone(), ());
            }
        }
    }

    let mut entries = Vec::new();
    for c in touched.keys() {
        let demand = component_demand(p, c)?;
        let capacity = flat.component(c).and_then(|fc| fc.capacity);
        let verdict = match capacity {
            Some(cap) if demand.bytes_per_second > cap as u128 => Verdict::Over,
            None => Verdict::UnspecifiedCapacity,
            Some(_) if !demand.unspecified.is_empty() => Verdict::UnspecifiedDemand,
            Some(_) => Verdict::Ok,
        };
        entries.push(CapacityEntry {
            demand,
            capacity,
            verdict,
        });
    }
    Ok(CapacityReport { entries })
}
