//! Fixed-order derivation from the universal fixed-order classes.
//!
//! Each seed pair `(k, class)` makes that class act as a class of fixed order
//! `k` when the two derivation rules fire:
//!
//! * an instance of a class of fixed order `n+1` has fixed order `n`;
//! * a subclass of a class of fixed order `n` has fixed order `n`.
//!
//! Derivation runs the full five-seed propagation to its least fixed point
//! rather than the three hand-simplified order queries; the seeds themselves
//! never receive an order by fiat, only through data edges. Every derived
//! (entity, order) pair carries one replayable witness chain: the shortest by
//! rule steps, ties broken by smallest seed order, then smallest parent id.

use std::fmt;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::graph::OntoGraph;
use crate::ids::{EdgeKind, EntityId, PropertyId};
use crate::par;

pub const DEFAULT_UNIVERSAL_CLASSES: [(u8, EntityId); 5] = [
    (1, EntityId::new(104_086_571)),
    (2, EntityId::new(24_017_414)),
    (3, EntityId::new(24_017_465)),
    (4, EntityId::new(24_027_474)),
    (5, EntityId::new(24_027_515)),
];

const MAX_ORDER: u8 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixedOrderError {
    #[error("seed orders must be distinct and contiguous from 1 (got {0:?})")]
    BadSeedOrders(Vec<u8>),
    #[error("at most {MAX_ORDER} seed orders are supported")]
    TooManySeeds,
    #[error("malformed seed line `{0}` (expected `order<TAB>Qid`)")]
    BadSeedLine(String),
}

/// The ordered list of universal fixed-order classes, configurable so
/// synthetic fixtures can nominate their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalOrderClasses {
    seeds: Vec<(u8, EntityId)>,
}

impl Default for UniversalOrderClasses {
    fn default() -> Self {
        UniversalOrderClasses {
            seeds: DEFAULT_UNIVERSAL_CLASSES.to_vec(),
        }
    }
}

impl UniversalOrderClasses {
    pub fn new(mut seeds: Vec<(u8, EntityId)>) -> Result<Self, FixedOrderError> {
        seeds.sort_unstable();
        let orders: Vec<u8> = seeds.iter().map(|&(k, _)| k).collect();
        if seeds.len() > MAX_ORDER as usize {
            return Err(FixedOrderError::TooManySeeds);
        }
        if orders.is_empty() || orders.iter().enumerate().any(|(i, &k)| k != i as u8 + 1) {
            return Err(FixedOrderError::BadSeedOrders(orders));
        }
        Ok(UniversalOrderClasses { seeds })
    }

    /// Parses a seed override file: one `order<TAB>Qid` per line, `#`
    /// comments and blank lines allowed.
    pub fn from_tsv(text: &str) -> Result<Self, FixedOrderError> {
        let mut seeds = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed = (|| {
                let (order, id) = line.split_once('\t')?;
                let order: u8 = order.trim().parse().ok()?;
                let id: EntityId = id.trim().parse().ok()?;
                Some((order, id))
            })();
            match parsed {
                Some(pair) => seeds.push(pair),
                None => return Err(FixedOrderError::BadSeedLine(line.to_owned())),
            }
        }
        UniversalOrderClasses::new(seeds)
    }

    pub fn seeds(&self) -> &[(u8, EntityId)] {
        &self.seeds
    }

    pub fn max_order(&self) -> u8 {
        self.seeds.len() as u8
    }
}

/// A set of derived orders (at most eight distinct orders).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderSet(u16);

impl OrderSet {
    pub fn insert(&mut self, order: u8) {
        debug_assert!((1..=MAX_ORDER).contains(&order));
        self.0 |= 1 << order;
    }

    pub fn contains(self, order: u8) -> bool {
        self.0 & (1 << order) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (1..=MAX_ORDER).filter(move |&k| self.contains(k))
    }
}

impl fmt::Display for OrderSet {
    /// Ascending orders joined with `;`, e.g. `1;2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in self.iter() {
            if !first {
                f.write_str(";")?;
            }
            write!(f, "{k}")?;
            first = false;
        }
        Ok(())
    }
}

/// One rule application: `entity` is an instance/subclass of the previous
/// chain element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStep {
    pub entity: EntityId,
    pub kind: EdgeKind,
}

/// A replayable derivation chain from a seed down to the assigned entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub seed: EntityId,
    pub seed_order: u8,
    /// Steps in application order; the last step's entity is the assigned one.
    pub steps: Vec<WitnessStep>,
}

impl Witness {
    /// Re-applies the chain against the graph, returning the derived
    /// (entity, order) pair, or `None` when an edge is missing or an
    /// instance step would drop below order 1.
    pub fn replay(&self, g: &OntoGraph) -> Option<(EntityId, u8)> {
        let mut prev = self.seed;
        let mut order = self.seed_order;
        for step in &self.steps {
            if !g.has_edge(crate::ids::RawEdge::new(step.entity, step.kind, prev)) {
                return None;
            }
            if step.kind == EdgeKind::InstanceOf {
                if order < 2 {
                    return None;
                }
                order -= 1;
            }
            prev = step.entity;
        }
        if self.steps.is_empty() {
            None
        } else {
            Some((prev, order))
        }
    }
}

impl fmt::Display for Witness {
    /// Entity-first chain up to the seed, e.g. `Q902-P279->Q901-P31->Q24017414@2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in self.steps.iter().rev() {
            write!(f, "{}-{}->", step.entity, step.kind)?;
        }
        write!(f, "{}@{}", self.seed, self.seed_order)
    }
}

/// Derived orders with one witness per (entity, order) pair.
#[derive(Debug, Default)]
pub struct OrderAssignment {
    orders: FxHashMap<EntityId, OrderSet>,
    witnesses: FxHashMap<(EntityId, u8), Witness>,
}

impl OrderAssignment {
    pub fn orders_of(&self, e: EntityId) -> OrderSet {
        self.orders.get(&e).copied().unwrap_or_default()
    }

    pub fn witness(&self, e: EntityId, order: u8) -> Option<&Witness> {
        self.witnesses.get(&(e, order))
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// All assignments, ascending by entity id.
    pub fn entries(&self) -> Vec<(EntityId, OrderSet)> {
        let mut out: Vec<(EntityId, OrderSet)> = self.orders.iter().map(|(&e, &s)| (e, s)).collect();
        out.sort_unstable();
        out
    }

    /// Entities whose order count is `order`, as a sorted id list.
    pub fn with_order(&self, order: u8) -> Vec<EntityId> {
        let mut out: Vec<EntityId> = self
            .orders
            .iter()
            .filter(|(_, s)| s.contains(order))
            .map(|(&e, _)| e)
            .collect();
        out.sort_unstable();
        out
    }
}

/// Candidate derivation considered during one stratum.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Cand {
    target: u32,
    order: u8,
    // Tie-break fields, in precedence order.
    chain_seed_order: u8,
    parent_id: EntityId,
    kind_rank: u8,
    parent: u32,
    parent_order: u8,
    from_seed: bool,
}

#[derive(Clone, Copy)]
struct Rec {
    parent: u32,
    parent_order: u8,
    kind: EdgeKind,
    chain_seed_order: u8,
    /// True when the parent acts as a virtual seed rather than a derived pair.
    from_seed: bool,
}

/// Least fixed point of the two derivation rules seeded by `u`. Confluent, so
/// the result is a pure function of the graph; the stratified schedule only
/// picks witnesses.
pub fn derive_orders(g: &OntoGraph, u: &UniversalOrderClasses) -> OrderAssignment {
    let mut recs: FxHashMap<(u32, u8), Rec> = FxHashMap::default();

    // Stratum 0: the universal classes act at their configured orders.
    // Seeds absent from the graph contribute nothing.
    let mut sources: Vec<(u32, u8, bool)> = Vec::new();
    for &(k, id) in u.seeds() {
        if let Ok(ix) = g.ix(id) {
            sources.push((ix, k, true));
        }
    }

    while !sources.is_empty() {
        let cands: Vec<Cand> = par::flat_map_collect(&sources, |&(y, n, virt)| {
            let chain_seed_order = if virt {
                n
            } else {
                recs[&(y, n)].chain_seed_order
            };
            let parent_id = g.id(y);
            let mut out = Vec::new();
            if n >= 2 {
                for &x in g.instance_sources(y) {
                    out.push(Cand {
                        target: x,
                        order: n - 1,
                        chain_seed_order,
                        parent_id,
                        kind_rank: 0,
                        parent: y,
                        parent_order: n,
                        from_seed: virt,
                    });
                }
            }
            for &x in g.subclass_sources(y) {
                out.push(Cand {
                    target: x,
                    order: n,
                    chain_seed_order,
                    parent_id,
                    kind_rank: 1,
                    parent: y,
                    parent_order: n,
                    from_seed: virt,
                });
            }
            out
        });

        let mut cands = cands;
        par::sort(&mut cands);
        let mut next: Vec<(u32, u8, bool)> = Vec::new();
        let mut last: Option<(u32, u8)> = None;
        for c in cands {
            let key = (c.target, c.order);
            if last == Some(key) || recs.contains_key(&key) {
                last = Some(key);
                continue;
            }
            last = Some(key);
            recs.insert(
                key,
                Rec {
                    parent: c.parent,
                    parent_order: c.parent_order,
                    kind: if c.kind_rank == 0 {
                        EdgeKind::InstanceOf
                    } else {
                        EdgeKind::SubclassOf
                    },
                    chain_seed_order: c.chain_seed_order,
                    from_seed: c.from_seed,
                },
            );
            next.push((c.target, c.order, false));
        }
        sources = next;
    }

    let mut assignment = OrderAssignment::default();
    for &(ix, order) in recs.keys() {
        assignment.orders.entry(g.id(ix)).or_default().insert(order);
        let witness = rebuild_witness(g, &recs, ix, order);
        assignment.witnesses.insert((g.id(ix), order), witness);
    }
    assignment
}

fn rebuild_witness(
    g: &OntoGraph,
    recs: &FxHashMap<(u32, u8), Rec>,
    ix: u32,
    order: u8,
) -> Witness {
    let mut steps = Vec::new();
    let (mut cur, mut cur_order) = (ix, order);
    loop {
        let rec = recs[&(cur, cur_order)];
        steps.push(WitnessStep {
            entity: g.id(cur),
            kind: rec.kind,
        });
        if rec.from_seed {
            steps.reverse();
            return Witness {
                seed: g.id(rec.parent),
                seed_order: rec.parent_order,
                steps,
            };
        }
        cur = rec.parent;
        cur_order = rec.parent_order;
    }
}

/// Entities with two or more derived orders; no non-empty class can have
/// multiple fixed orders, so each is a data error.
pub fn order_conflicts(a: &OrderAssignment) -> Vec<(EntityId, OrderSet)> {
    let mut out: Vec<(EntityId, OrderSet)> = a
        .orders
        .iter()
        .filter(|(_, s)| s.len() >= 2)
        .map(|(&e, &s)| (e, s))
        .collect();
    out.sort_unstable();
    out
}

/// How many entities carry both orders. Precondition: `n != m`.
pub fn order_overlap(a: &OrderAssignment, n: u8, m: u8) -> usize {
    assert!(n != m, "overlap orders must differ");
    a.orders
        .values()
        .filter(|s| s.contains(n) && s.contains(m))
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaProperty {
    /// `P2445`: subject and object metaclass should share a fixed order.
    MetasubclassOf,
    /// `P8225`: subject order should be one greater than the object's.
    IsMetaclassFor,
}

impl MetaProperty {
    pub fn property(self) -> PropertyId {
        match self {
            MetaProperty::MetasubclassOf => PropertyId::METASUBCLASS_OF,
            MetaProperty::IsMetaclassFor => PropertyId::IS_METACLASS_FOR,
        }
    }
}

impl fmt::Display for MetaProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.property().fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetaclassEdge {
    pub subject: EntityId,
    pub property: MetaProperty,
    pub object: EntityId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaclassStatus {
    /// Both sides have derived orders and they cannot satisfy the property.
    Violation,
    /// At least one side has no derived order; nothing can be concluded.
    Undecidable,
    /// An endpoint is not in the graph; reported, processing continues.
    UnknownEndpoint,
}

impl fmt::Display for MetaclassStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetaclassStatus::Violation => "violation",
            MetaclassStatus::Undecidable => "undecidable",
            MetaclassStatus::UnknownEndpoint => "unknown-endpoint",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaclassFinding {
    pub edge: MetaclassEdge,
    pub status: MetaclassStatus,
    pub expected: &'static str,
    pub subject_orders: OrderSet,
    pub object_orders: OrderSet,
}

/// Checks metaclass-property statements against derived orders. Compliant
/// edges produce no finding.
pub fn check_metaclass_edges(
    g: &OntoGraph,
    a: &OrderAssignment,
    edges: &[MetaclassEdge],
) -> Vec<MetaclassFinding> {
    edges
        .iter()
        .filter_map(|&edge| {
            let expected = match edge.property {
                MetaProperty::MetasubclassOf => "subject and object share a fixed order",
                MetaProperty::IsMetaclassFor => "subject order = object order + 1",
            };
            if !g.contains(edge.subject) || !g.contains(edge.object) {
                return Some(MetaclassFinding {
                    edge,
                    status: MetaclassStatus::UnknownEndpoint,
                    expected,
                    subject_orders: OrderSet::default(),
                    object_orders: OrderSet::default(),
                });
            }
            let subject_orders = a.orders_of(edge.subject);
            let object_orders = a.orders_of(edge.object);
            if subject_orders.is_empty() || object_orders.is_empty() {
                return Some(MetaclassFinding {
                    edge,
                    status: MetaclassStatus::Undecidable,
                    expected,
                    subject_orders,
                    object_orders,
                });
            }
            let satisfiable = match edge.property {
                MetaProperty::MetasubclassOf => {
                    subject_orders.iter().any(|s| object_orders.contains(s))
                }
                MetaProperty::IsMetaclassFor => subject_orders
                    .iter()
                    .any(|s| s >= 2 && object_orders.contains(s - 1)),
            };
            if satisfiable {
                None
            } else {
                Some(MetaclassFinding {
                    edge,
                    status: MetaclassStatus::Violation,
                    expected,
                    subject_orders,
                    object_orders,
                })
            }
        })
        .collect()
}

/// Parses metaclass statements from TSV `Qs<TAB>P2445|P8225<TAB>Qo`.
pub fn parse_metaclass_tsv(text: &str) -> Result<Vec<MetaclassEdge>, String> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim_end();
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed = (|| {
            let mut fields = line.split('\t');
            let subject: EntityId = fields.next()?.parse().ok()?;
            let property = match fields.next()? {
                "P2445" => MetaProperty::MetasubclassOf,
                "P8225" => MetaProperty::IsMetaclassFor,
                _ => return None,
            };
            let object: EntityId = fields.next()?.parse().ok()?;
            if fields.next().is_some() {
                return None;
            }
            Some(MetaclassEdge {
                subject,
                property,
                object,
            })
        })();
        match parsed {
            Some(edge) => out.push(edge),
            None => return Err(format!("malformed metaclass line `{line}`")),
        }
    }
    Ok(out)
}
