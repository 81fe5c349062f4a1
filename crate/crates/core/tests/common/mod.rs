//! Shared test support: brute-force oracles written straight from the
//! definitions (independent of the library's implementation paths) and a
//! deterministic random-platform generator.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand::rngs::StdRng;

use itfkit_core::model::{Component, ComponentId, Link, Platform, Role, SymmetryClass};
use itfkit_core::txn::{Application, Transaction};

// ---------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------

/// Definitional all-simple-paths enumeration over the raw link list:
/// head `from`, tail `to`, interior hops transporters, no repeats.
pub fn paths_oracle(
    links: &[(ComponentId, ComponentId)],
    roles: &BTreeMap<ComponentId, Role>,
    from: &ComponentId,
    to: &ComponentId,
) -> Vec<Vec<ComponentId>> {
    let mut out = Vec::new();
    let mut current = vec![from.clone()];
    paths_rec(links, roles, to, &mut current, &mut out);
    out.sort();
    out
}

fn paths_rec(
    links: &[(ComponentId, ComponentId)],
    roles: &BTreeMap<ComponentId, Role>,
    to: &ComponentId,
    current: &mut Vec<ComponentId>,
    out: &mut Vec<Vec<ComponentId>>,
) {
    let last = current.last().unwrap().clone();
    for (f, t) in links {
        if *f != last {
            continue;
        }
        if t == to {
            let mut p = current.clone();
            p.push(t.clone());
            out.push(p);
            continue;
        }
        if current.contains(t) || roles.get(t) != Some(&Role::Transporter) {
            continue;
        }
        current.push(t.clone());
        paths_rec(links, roles, to, current, out);
        current.pop();
    }
}

/// A scenario as the oracle sees it: the sorted qualified names of its
/// members.
pub type ScenarioKey = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleKind {
    Itf(BTreeSet<ComponentId>),
    Free,
    Partial,
}

/// Classification from the definition: intersect all paths as sets; if
/// empty, check every pairwise intersection.
pub fn classify_oracle(txns: &[&Transaction]) -> OracleKind {
    let sets: Vec<BTreeSet<&ComponentId>> =
        txns.iter().map(|t| t.path.iter().collect()).collect();
    let mut common: BTreeSet<&ComponentId> = sets[0].clone();
    for s in &sets[1..] {
        common = common.intersection(s).copied().collect();
    }
    if !common.is_empty() {
        return OracleKind::Itf(common.into_iter().cloned().collect());
    }
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i].intersection(&sets[j]).next().is_some() {
                return OracleKind::Partial;
            }
        }
    }
    OracleKind::Free
}

/// Brute-force channel enumeration: every subset of transactions of size
/// `2..=n_max` (by bitmask) with pairwise distinct initiators and, unless
/// `include_same_app`, distinct applications; a subset with a non-empty
/// common component set contributes to each component of that set.
pub fn channels_oracle(
    p: &Platform,
    n_max: usize,
    include_same_app: bool,
) -> BTreeMap<ComponentId, Vec<ScenarioKey>> {
    let txns = p.transactions();
    let n = txns.len();
    assert!(n <= 20, "oracle is exponential; keep instances small");
    let mut map: BTreeMap<ComponentId, Vec<ScenarioKey>> = BTreeMap::new();
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size < 2 || size > n_max {
            continue;
        }
        let chosen: Vec<&Transaction> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| txns[i])
            .collect();
        let initiators: BTreeSet<_> = chosen.iter().map(|t| t.initiator()).collect();
        if initiators.len() != size {
            continue;
        }
        if !include_same_app {
            let apps: BTreeSet<_> = chosen.iter().map(|t| &t.app).collect();
            if apps.len() != size {
                continue;
            }
        }
        if let OracleKind::Itf(channel) = classify_oracle(&chosen) {
            let mut key: ScenarioKey =
                chosen.iter().map(|t| t.qualified_name()).collect();
            key.sort();
            for c in channel {
                map.entry(c).or_default().push(key.clone());
            }
        }
    }
    for v in map.values_mut() {
        v.sort();
    }
    map
}

/// Worst-case line count by enumerating every start offset an access
/// aligned to `alignment` can have within a `line`-sized window.
pub fn expansion_oracle(payload: u64, line: u64, alignment: u64) -> u64 {
    let mut worst = 0;
    for k in 0..=line {
        let offset = (k * alignment) % line;
        let lines = (offset + payload - 1) / line + 1;
        worst = worst.max(lines);
    }
    worst
}

/// Footprint of a scenario with component ids relabeled: the sorted
/// multiset of (service, rate, payload, path).
type Footprint = Vec<(String, u64, u64, Vec<ComponentId>)>;

fn footprint_of(key: &ScenarioKey, p: &Platform, relabel: &BTreeMap<ComponentId, ComponentId>) -> Footprint {
    let mut fp: Footprint = key
        .iter()
        .map(|qname| {
            let t = p
                .transactions()
                .into_iter()
                .find(|t| t.qualified_name() == *qname)
                .expect("scenario member exists")
                .clone();
            let path = t
                .path
                .iter()
                .map(|c| relabel.get(c).cloned().unwrap_or_else(|| c.clone()))
                .collect();
            (t.service.as_str().to_string(), t.rate, t.payload, path)
        })
        .collect();
    fp.sort();
    fp
}

/// Every relabeling map in the group generated by the platform's
/// symmetry classes: the product, over classes, of all permutations of
/// that class's members. Exponential; for oracle-sized instances only.
fn group_elements(p: &Platform) -> Vec<BTreeMap<ComponentId, ComponentId>> {
    fn permutations(items: &[ComponentId]) -> Vec<Vec<ComponentId>> {
        if items.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for (i, first) in items.iter().enumerate() {
            let mut rest: Vec<ComponentId> = items.to_vec();
            rest.remove(i);
            for mut tail in permutations(&rest) {
                tail.insert(0, first.clone());
                out.push(tail);
            }
        }
        out
    }

    let mut elements: Vec<BTreeMap<ComponentId, ComponentId>> = vec![BTreeMap::new()];
    for sc in &p.symmetries {
        let perms = permutations(&sc.members);
        let mut next = Vec::with_capacity(elements.len() * perms.len());
        for base in &elements {
            for perm in &perms {
                let mut g = base.clone();
                for (from, to) in sc.members.iter().zip(perm) {
                    g.insert(from.clone(), to.clone());
                }
                next.push(g);
            }
        }
        elements = next;
        assert!(elements.len() <= 50_000, "oracle group too large");
    }
    elements
}

/// Orbit partition by brute force over the full symmetry group: two
/// scenarios are equivalent when some group element maps the footprint of
/// one onto the other's. The relation is transitive by group closure, so
/// a single pairwise pass suffices.
pub fn orbit_oracle(p: &Platform, keys: &[ScenarioKey]) -> Vec<Vec<usize>> {
    let id = BTreeMap::new();
    let footprints: Vec<Footprint> =
        keys.iter().map(|k| footprint_of(k, p, &id)).collect();
    let group = group_elements(p);

    let mut parent: Vec<usize> = (0..keys.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }

    for (i, key) in keys.iter().enumerate() {
        for g in &group {
            let image = footprint_of(key, p, g);
            for (j, fp) in footprints.iter().enumerate().skip(i + 1) {
                if *fp == image {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..keys.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

// ---------------------------------------------------------------------
// Random platform generation
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_initiators: usize,
    pub max_transporters: usize,
    pub max_targets: usize,
    pub max_transactions: usize,
    pub composites: bool,
    pub symmetry: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_initiators: 6,
            max_transporters: 3,
            max_targets: 3,
            max_transactions: 10,
            composites: true,
            symmetry: true,
        }
    }
}

/// Oracle-equivalence sizing: at most 6 initiators, 12 components,
/// 10 transactions, flat.
pub fn small_config() -> GenConfig {
    GenConfig {
        max_initiators: 6,
        max_transporters: 3,
        max_targets: 3,
        max_transactions: 10,
        composites: false,
        symmetry: false,
    }
}

const SERVICES: [&str; 3] = ["load", "store", "config"];

/// Deterministic random platform. Always valid; transactions follow real
/// link paths by construction.
pub fn gen_platform(seed: u64, cfg: &GenConfig) -> Platform {
    let mut rng = StdRng::seed_from_u64(seed);
    let n_init = rng.gen_range(1..=cfg.max_initiators);
    let n_trans = rng.gen_range(1..=cfg.max_transporters);
    let n_tgt = rng.gen_range(1..=cfg.max_targets);

    let mut p = Platform::new(format!("gen{seed}"));

    // Symmetric clone group: the first `clone` initiators share identical
    // adjacency and get declared as a class.
    let clones = if cfg.symmetry && n_init >= 2 && rng.gen_bool(0.5) {
        rng.gen_range(2..=n_init)
    } else {
        0
    };

    // Composite wrapping for a prefix of the initiators.
    let wrapped = if cfg.composites && rng.gen_bool(0.4) {
        rng.gen_range(1..=n_init)
    } else {
        0
    };

    let mut initiator_ids: Vec<ComponentId> = Vec::new();
    let mut pack_children = Vec::new();
    for i in 0..n_init {
        let name = format!("I{i}");
        if i < wrapped {
            pack_children.push(Component::initiator(&name));
            initiator_ids.push(ComponentId::new(format!("Pack.{name}")));
        } else {
            p.components.push(Component::initiator(&name));
            initiator_ids.push(ComponentId::new(name));
        }
    }
    if !pack_children.is_empty() {
        p.components.push(Component::composite("Pack", pack_children));
    }

    let transporter_ids: Vec<ComponentId> = (0..n_trans)
        .map(|i| {
            let name = format!("B{i}");
            let mut c = Component::transporter(&name);
            if rng.gen_bool(0.3) {
                c = c.with_capacity(rng.gen_range(1_000..1_000_000_000));
            }
            p.components.push(c);
            ComponentId::new(name)
        })
        .collect();

    let target_ids: Vec<ComponentId> = (0..n_tgt)
        .map(|i| {
            let name = format!("T{i}");
            let mut c = Component::target(&name);
            let count = rng.gen_range(1..=SERVICES.len());
            for s in SERVICES.iter().choose_multiple(&mut rng, count) {
                c = c.with_service(*s);
            }
            if rng.gen_bool(0.5) {
                c = c.with_capacity(rng.gen_range(1_000..1_000_000_000));
            }
            if rng.gen_bool(0.2) {
                c = c.with_classification(itfkit_core::model::DeviceClassification {
                    origin: *[
                        itfkit_core::model::Origin::CotsDevice,
                        itfkit_core::model::Origin::CotsIpSoft,
                        itfkit_core::model::Origin::CotsIpHard,
                        itfkit_core::model::Origin::Custom,
                    ]
                    .choose(&mut rng)
                    .unwrap(),
                    complexity: if rng.gen_bool(0.5) {
                        itfkit_core::model::Complexity::Simple
                    } else {
                        itfkit_core::model::Complexity::Complex
                    },
                    notes: "generated fixture".into(),
                });
            }
            p.components.push(c);
            ComponentId::new(name)
        })
        .collect();

    let mut links: BTreeSet<(ComponentId, ComponentId)> = BTreeSet::new();

    // Clone adjacency decided once, applied to every clone member.
    let clone_outs: Vec<ComponentId> = {
        let mut outs = Vec::new();
        let n = rng.gen_range(1..=transporter_ids.len());
        for t in transporter_ids.iter().choose_multiple(&mut rng, n) {
            outs.push(t.clone());
        }
        outs
    };

    for (i, id) in initiator_ids.iter().enumerate() {
        if i < clones {
            for t in &clone_outs {
                links.insert((id.clone(), t.clone()));
            }
        } else {
            let n = rng.gen_range(1..=transporter_ids.len());
            for t in transporter_ids.iter().choose_multiple(&mut rng, n) {
                links.insert((id.clone(), t.clone()));
            }
            if rng.gen_bool(0.3) {
                let t = target_ids.iter().choose(&mut rng).unwrap();
                links.insert((id.clone(), t.clone()));
            }
        }
    }
    // Forward transporter-to-transporter links keep the graph acyclic.
    for i in 0..transporter_ids.len() {
        for j in i + 1..transporter_ids.len() {
            if rng.gen_bool(0.4) {
                links.insert((transporter_ids[i].clone(), transporter_ids[j].clone()));
            }
        }
        let n = rng.gen_range(1..=target_ids.len());
        for t in target_ids.iter().choose_multiple(&mut rng, n) {
            links.insert((transporter_ids[i].clone(), t.clone()));
        }
    }

    p.links = links
        .iter()
        .map(|(f, t)| Link::new(f.clone(), t.clone()))
        .collect();

    if clones >= 2 {
        p.symmetries.push(SymmetryClass::new(
            "clones",
            initiator_ids[..clones].to_vec(),
        ));
    }

    // Transactions along real paths.
    let flat = itfkit_core::model::flatten(&p).expect("generated platform is valid");
    let n_txn = rng.gen_range(0..=cfg.max_transactions);
    let mut txns: Vec<Transaction> = Vec::new();
    for k in 0..n_txn {
        let from = initiator_ids.iter().choose(&mut rng).unwrap();
        let to = target_ids.iter().choose(&mut rng).unwrap();
        let Ok(paths) = itfkit_core::txn::enumerate_paths(&flat, from, to) else {
            continue;
        };
        if paths.is_empty() {
            continue;
        }
        let path = paths.iter().choose(&mut rng).unwrap().clone();
        let target = flat.component(to).unwrap();
        let service = target.services.iter().choose(&mut rng).unwrap().clone();
        let (rate, payload) = if rng.gen_bool(0.7) {
            (rng.gen_range(1..10_000), rng.gen_range(1..4_096))
        } else {
            (0, 0)
        };
        // Mostly one application per transaction; occasionally shared.
        let app = if !txns.is_empty() && rng.gen_bool(0.15) {
            txns[rng.gen_range(0..txns.len())].app.clone()
        } else {
            format!("app{k}")
        };
        txns.push(Transaction {
            app,
            name: format!("t{k}"),
            path,
            service,
            rate,
            payload,
        });
    }
    let mut apps: BTreeMap<String, Application> = BTreeMap::new();
    for t in txns {
        apps.entry(t.app.clone())
            .or_insert_with(|| Application::new(t.app.clone()))
            .transactions
            .push(t);
    }
    p.applications = apps.into_values().collect();

    debug_assert!(itfkit_core::validate_platform(&p).is_empty());
    p
}

/// Path to a bundled model file.
pub fn model_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
}

/// Parse a bundled model or panic with its diagnostics.
pub fn load_model(name: &str) -> Platform {
    let path = model_path(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    itfkit_core::dsl::parse(&text, &path.to_string_lossy()).unwrap_or_else(|diags| {
        panic!(
            "{} does not parse:\n{}",
            name,
            diags
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("\n")
        )
    })
}
