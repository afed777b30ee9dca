//! Brute-force reference implementations and shared fixtures.
//!
//! Everything here recomputes results by definition — edge-list scans
//! iterated to a fixed point, exhaustive chain and cycle enumeration —
//! independently of the production closure machinery, so the two can be
//! checked against each other on small graphs. Also hosts the seeded graph
//! generators used by the property suites and benches.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;

use crate::census::{ClassDef, ClassSelector};
use crate::fixed_order::UniversalOrderClasses;
use crate::graph::{GraphError, OntoGraph};
use crate::ids::{q, EdgeKind, EntityId, RawEdge};
use crate::ingest;
use crate::split_order::SplitPair;

const NAIVE_ENTITY_CAP: usize = 10_000;

/// Desk-scale fixture exercising a self loop, a two-hop loop, a split pair,
/// and a non-class instance:
/// P31 {Q2→Q1, Q3→Q2, Q4→Q3, Q5→Q5, Q6→Q7, Q7→Q6, Q8→Q1, Q11→Q9},
/// P279 {Q9→Q1, Q10→Q9, Q11→Q1}.
pub fn fixture_g1_edges() -> Vec<RawEdge> {
    let inst = [(2, 1), (3, 2), (4, 3), (5, 5), (6, 7), (7, 6), (8, 1), (11, 9)];
    let sub = [(9, 1), (10, 9), (11, 1)];
    let mut edges: Vec<RawEdge> = inst
        .iter()
        .map(|&(s, o)| RawEdge::new(q(s), EdgeKind::InstanceOf, q(o)))
        .collect();
    edges.extend(
        sub.iter()
            .map(|&(s, o)| RawEdge::new(q(s), EdgeKind::SubclassOf, q(o))),
    );
    edges.sort_unstable();
    edges
}

pub fn fixture_g1() -> OntoGraph {
    OntoGraph::build(&fixture_g1_edges(), &FxHashMap::default())
}

/// G1 in the TSV ingest format, for end-to-end runs.
pub fn fixture_g1_tsv() -> String {
    ingest::render_tsv(&fixture_g1_edges(), &FxHashMap::default())
}

/// Two-order conflict fixture:
/// P31 {Q901→Q24017414, Q903→Q24017414, Q903→Q24017465}, P279 {Q902→Q901}.
pub fn fixture_g2_edges() -> Vec<RawEdge> {
    let mut edges = vec![
        RawEdge::new(q(901), EdgeKind::InstanceOf, q(24_017_414)),
        RawEdge::new(q(903), EdgeKind::InstanceOf, q(24_017_414)),
        RawEdge::new(q(903), EdgeKind::InstanceOf, q(24_017_465)),
        RawEdge::new(q(902), EdgeKind::SubclassOf, q(901)),
    ];
    edges.sort_unstable();
    edges
}

pub fn fixture_g2() -> OntoGraph {
    OntoGraph::build(&fixture_g2_edges(), &FxHashMap::default())
}

pub fn fixture_g2_tsv() -> String {
    ingest::render_tsv(&fixture_g2_edges(), &FxHashMap::default())
}

/// Test helper: graph from (subject, object) pair lists.
pub fn graph_from_pairs(inst: &[(u64, u64)], sub: &[(u64, u64)]) -> OntoGraph {
    let mut edges: Vec<RawEdge> = inst
        .iter()
        .map(|&(s, o)| RawEdge::new(q(s), EdgeKind::InstanceOf, q(o)))
        .collect();
    edges.extend(
        sub.iter()
            .map(|&(s, o)| RawEdge::new(q(s), EdgeKind::SubclassOf, q(o))),
    );
    OntoGraph::build(&edges, &FxHashMap::default())
}

fn check_naive_pre(g: &OntoGraph) {
    assert!(
        g.n_entities() <= NAIVE_ENTITY_CAP,
        "naive oracles are for small graphs"
    );
}

fn edge_pairs(g: &OntoGraph, kind: EdgeKind) -> Vec<(EntityId, EntityId)> {
    g.edges()
        .into_iter()
        .filter(|e| e.kind == kind)
        .map(|e| (e.subject, e.object))
        .collect()
}

/// Closure of `start` under the given edge pairs, by whole-list rescans
/// until nothing changes.
fn saturate(start: BTreeSet<EntityId>, pairs: &[(EntityId, EntityId)]) -> BTreeSet<EntityId> {
    let mut set = start;
    loop {
        let mut grew = false;
        for &(a, b) in pairs {
            if set.contains(&a) && set.insert(b) {
                grew = true;
            }
        }
        if !grew {
            return set;
        }
    }
}

pub fn naive_up_set(g: &OntoGraph, x: EntityId) -> Result<Vec<EntityId>, GraphError> {
    check_naive_pre(g);
    if !g.contains(x) {
        return Err(GraphError::UnknownEntity(x));
    }
    let sub = edge_pairs(g, EdgeKind::SubclassOf);
    Ok(saturate(BTreeSet::from([x]), &sub).into_iter().collect())
}

pub fn naive_down_set(g: &OntoGraph, x: EntityId) -> Result<Vec<EntityId>, GraphError> {
    check_naive_pre(g);
    if !g.contains(x) {
        return Err(GraphError::UnknownEntity(x));
    }
    let rev: Vec<(EntityId, EntityId)> = edge_pairs(g, EdgeKind::SubclassOf)
        .into_iter()
        .map(|(a, b)| (b, a))
        .collect();
    Ok(saturate(BTreeSet::from([x]), &rev).into_iter().collect())
}

pub fn naive_type_set(g: &OntoGraph, x: EntityId) -> Result<Vec<EntityId>, GraphError> {
    check_naive_pre(g);
    if !g.contains(x) {
        return Err(GraphError::UnknownEntity(x));
    }
    let inst = edge_pairs(g, EdgeKind::InstanceOf);
    let sub = edge_pairs(g, EdgeKind::SubclassOf);
    let start: BTreeSet<EntityId> = inst
        .iter()
        .filter(|&&(a, _)| a == x)
        .map(|&(_, b)| b)
        .collect();
    Ok(saturate(start, &sub).into_iter().collect())
}

pub fn naive_classes(g: &OntoGraph, def: ClassDef) -> Vec<EntityId> {
    check_naive_pre(g);
    let inst = edge_pairs(g, EdgeKind::InstanceOf);
    let sub = edge_pairs(g, EdgeKind::SubclassOf);
    let mut out: BTreeSet<EntityId> = BTreeSet::new();
    match def.selector {
        ClassSelector::HasInstance => {
            for &(_, c) in &inst {
                out.extend(naive_up_set(g, c).unwrap());
            }
        }
        ClassSelector::HasSubOrSuper => {
            for &(a, b) in &sub {
                out.insert(a);
                out.insert(b);
            }
        }
        ClassSelector::InstanceOfClassClass => {
            if g.contains(def.class_class) {
                for e in g.entities() {
                    if naive_type_set(g, e).unwrap().contains(&def.class_class) {
                        out.insert(e);
                    }
                }
            }
        }
        ClassSelector::AnyOf => {
            for sel in [
                ClassSelector::HasInstance,
                ClassSelector::HasSubOrSuper,
                ClassSelector::InstanceOfClassClass,
            ] {
                out.extend(naive_classes(
                    g,
                    ClassDef::with_class_class(sel, def.class_class),
                ));
            }
        }
    }
    out.into_iter().collect()
}

/// Triple loop over (c, mid, s): s ∈ up(c), mid ∈ up(c), and mid is an
/// instance of some t with s ∈ up(t).
pub fn naive_split_pairs(g: &OntoGraph) -> Vec<(EntityId, EntityId)> {
    check_naive_pre(g);
    let inst = edge_pairs(g, EdgeKind::InstanceOf);
    let ups: FxHashMap<EntityId, Vec<EntityId>> = g
        .entities()
        .map(|e| (e, naive_up_set(g, e).unwrap()))
        .collect();
    let mut out = Vec::new();
    for c in g.entities() {
        let up_c = &ups[&c];
        let mut hits: BTreeSet<EntityId> = BTreeSet::new();
        for &mid in up_c {
            for &(a, t) in &inst {
                if a == mid {
                    hits.extend(ups[&t].iter().copied());
                }
            }
        }
        for &s in up_c {
            if hits.contains(&s) {
                out.push((c, s));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Exclusion rule replayed literally against a raw pair list.
pub fn naive_split_exclusions(
    g: &OntoGraph,
    raw: &[SplitPair],
) -> Vec<(EntityId, EntityId)> {
    check_naive_pre(g);
    let sub = edge_pairs(g, EdgeKind::SubclassOf);
    let members: BTreeSet<(EntityId, EntityId)> = raw.iter().map(|p| (p.c, p.s)).collect();
    let mut out = Vec::new();
    for &(c, s) in &members {
        if c == s {
            continue;
        }
        let by_super = sub
            .iter()
            .any(|&(a, b)| a == c && members.contains(&(b, s)));
        let by_sub = sub
            .iter()
            .any(|&(a, b)| b == s && a != c && members.contains(&(c, a)));
        if by_super || by_sub {
            out.push((c, s));
        }
    }
    out
}

/// Chain enumeration: level n+1 is every type of a level-n entity.
pub fn naive_min_levels(g: &OntoGraph, def: ClassDef, k: usize) -> Vec<Vec<EntityId>> {
    check_naive_pre(g);
    assert!(k >= 1);
    let mut levels = vec![naive_classes(g, def)];
    for _ in 1..k {
        let prev = levels.last().unwrap();
        let mut next: BTreeSet<EntityId> = BTreeSet::new();
        for &x in prev {
            next.extend(naive_type_set(g, x).unwrap());
        }
        levels.push(next.into_iter().collect());
    }
    levels
}

/// Rule iteration from the seed list until stable. Returns orders per
/// entity; seeds contribute their configured order without receiving it.
pub fn naive_orders(g: &OntoGraph, u: &UniversalOrderClasses) -> BTreeMap<EntityId, BTreeSet<u8>> {
    check_naive_pre(g);
    let inst = edge_pairs(g, EdgeKind::InstanceOf);
    let sub = edge_pairs(g, EdgeKind::SubclassOf);
    let seed_order: FxHashMap<EntityId, u8> =
        u.seeds().iter().map(|&(k, id)| (id, k)).collect();
    let mut derived: BTreeMap<EntityId, BTreeSet<u8>> = BTreeMap::new();

    let orders_of = |derived: &BTreeMap<EntityId, BTreeSet<u8>>, e: EntityId| {
        let mut set: BTreeSet<u8> = derived.get(&e).cloned().unwrap_or_default();
        if let Some(&k) = seed_order.get(&e) {
            set.insert(k);
        }
        set
    };

    loop {
        let mut grew = false;
        for &(x, y) in &inst {
            for n in orders_of(&derived, y) {
                if n >= 2 && derived.entry(x).or_default().insert(n - 1) {
                    grew = true;
                }
            }
        }
        for &(x, y) in &sub {
            for n in orders_of(&derived, y) {
                if derived.entry(x).or_default().insert(n) {
                    grew = true;
                }
            }
        }
        if !grew {
            derived.retain(|_, set| !set.is_empty());
            return derived;
        }
    }
}

/// Members of self instance loops: one instance hop, subclass path back.
pub fn naive_self_loop_members(g: &OntoGraph) -> Vec<EntityId> {
    check_naive_pre(g);
    let inst = edge_pairs(g, EdgeKind::InstanceOf);
    let mut out: BTreeSet<EntityId> = BTreeSet::new();
    for &(x, y) in &inst {
        if naive_up_set(g, y).unwrap().contains(&x) {
            out.insert(x);
        }
    }
    out.into_iter().collect()
}

/// Mutual typing pairs, each side one instance hop then subclass closure.
pub fn naive_two_hop_pairs(g: &OntoGraph) -> Vec<(EntityId, EntityId)> {
    check_naive_pre(g);
    let types: FxHashMap<EntityId, Vec<EntityId>> = g
        .entities()
        .map(|e| (e, naive_type_set(g, e).unwrap()))
        .collect();
    let entities: Vec<EntityId> = g.entities().collect();
    let mut out = Vec::new();
    for (i, &a) in entities.iter().enumerate() {
        for &b in &entities[i + 1..] {
            if types[&a].contains(&b) && types[&b].contains(&a) {
                out.push((a, b));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Components of the typed-by relation, via its exhaustive transitive
/// closure; groups of mutually-typing entities, each sorted.
pub fn naive_typing_cycle_groups(g: &OntoGraph) -> Vec<Vec<EntityId>> {
    check_naive_pre(g);
    let entities: Vec<EntityId> = g.entities().collect();
    let n = entities.len();
    let pos: FxHashMap<EntityId, usize> =
        entities.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut reach = vec![vec![false; n]; n];
    for (i, &e) in entities.iter().enumerate() {
        for t in naive_type_set(g, e).unwrap() {
            reach[i][pos[&t]] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let via: Vec<usize> = (0..n).filter(|&j| reach[k][j]).collect();
                for j in via {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut groups: Vec<Vec<EntityId>> = Vec::new();
    let mut grouped = vec![false; n];
    for i in 0..n {
        if grouped[i] || !reach[i][i] {
            continue;
        }
        let mut group = Vec::new();
        for j in i..n {
            if !grouped[j] && reach[i][j] && reach[j][i] && reach[j][j] {
                group.push(entities[j]);
                grouped[j] = true;
            }
        }
        group.sort_unstable();
        groups.push(group);
    }
    groups.sort_unstable();
    groups
}

/// Fixpoint of type-set expansion from seeds, by rescans.
pub fn naive_affected(g: &OntoGraph, seeds: &[EntityId]) -> Vec<EntityId> {
    check_naive_pre(g);
    let mut set: BTreeSet<EntityId> = seeds.iter().copied().collect();
    loop {
        let mut grew = false;
        for x in set.clone() {
            for t in naive_type_set(g, x).unwrap() {
                if set.insert(t) {
                    grew = true;
                }
            }
        }
        if !grew {
            return set.into_iter().collect();
        }
    }
}

/// SplitMix64: tiny deterministic PRNG for seeded fixtures.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn chance(&mut self, p: f64) -> bool {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) < p
    }
}

/// Parameters of the random-graph suite; part of the test manifest so
/// failures reproduce from (seed, index).
#[derive(Debug, Clone)]
pub struct RandomGraphSpec {
    pub seed: u64,
    pub max_nodes: u64,
    pub p_instance: f64,
    pub p_subclass: f64,
    pub forced_self_loop_rate: f64,
}

impl Default for RandomGraphSpec {
    fn default() -> Self {
        RandomGraphSpec {
            seed: 0x0db5_e7c1,
            max_nodes: 60,
            p_instance: 0.05,
            p_subclass: 0.05,
            forced_self_loop_rate: 0.10,
        }
    }
}

/// The `index`-th random graph of the suite: every ordered pair draws each
/// edge kind independently, plus a forced self instance loop in a fraction
/// of graphs.
pub fn random_graph(spec: &RandomGraphSpec, index: u64) -> OntoGraph {
    let mut rng = SplitMix64::new(spec.seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let n = 2 + rng.below(spec.max_nodes - 1);
    let mut edges = Vec::new();
    for s in 1..=n {
        for o in 1..=n {
            if s == o {
                continue;
            }
            if rng.chance(spec.p_instance) {
                edges.push(RawEdge::new(q(s), EdgeKind::InstanceOf, q(o)));
            }
            if rng.chance(spec.p_subclass) {
                edges.push(RawEdge::new(q(s), EdgeKind::SubclassOf, q(o)));
            }
        }
    }
    if rng.chance(spec.forced_self_loop_rate) {
        let x = 1 + rng.below(n);
        edges.push(RawEdge::new(q(x), EdgeKind::InstanceOf, q(x)));
    }
    OntoGraph::build(&edges, &FxHashMap::default())
}

/// A graph whose only cycles are injected, structurally disjoint loops, so
/// one removal per loop restores acyclicity. Returns the graph and the
/// number of injected loops.
pub fn random_loop_graph(seed: u64, index: u64) -> (OntoGraph, usize) {
    let mut rng = SplitMix64::new(seed ^ index.wrapping_mul(0x2545_f491_4f6c_dd1d));
    let base_nodes = 8 + rng.below(16);
    let mut edges = Vec::new();
    // Forward-only base: edges point from larger to smaller ids, so the base
    // contributes no cycle of either kind.
    for s in 2..=base_nodes {
        for o in 1..s {
            if rng.chance(0.08) {
                edges.push(RawEdge::new(q(s), EdgeKind::InstanceOf, q(o)));
            }
            if rng.chance(0.08) {
                edges.push(RawEdge::new(q(s), EdgeKind::SubclassOf, q(o)));
            }
        }
    }
    let n_loops = 1 + rng.below(3) as usize;
    let mut next = base_nodes + 1;
    for _ in 0..n_loops {
        match rng.below(4) {
            0 => {
                edges.push(RawEdge::new(q(next), EdgeKind::InstanceOf, q(next)));
                next += 1;
            }
            1 => {
                let (x, y, z) = (next, next + 1, next + 2);
                edges.push(RawEdge::new(q(x), EdgeKind::InstanceOf, q(y)));
                edges.push(RawEdge::new(q(y), EdgeKind::SubclassOf, q(z)));
                edges.push(RawEdge::new(q(z), EdgeKind::SubclassOf, q(x)));
                next += 3;
            }
            2 => {
                let (a, b) = (next, next + 1);
                edges.push(RawEdge::new(q(a), EdgeKind::InstanceOf, q(b)));
                edges.push(RawEdge::new(q(b), EdgeKind::InstanceOf, q(a)));
                next += 2;
            }
            _ => {
                let (a, ta, b, tb) = (next, next + 1, next + 2, next + 3);
                edges.push(RawEdge::new(q(a), EdgeKind::InstanceOf, q(ta)));
                edges.push(RawEdge::new(q(ta), EdgeKind::SubclassOf, q(b)));
                edges.push(RawEdge::new(q(b), EdgeKind::InstanceOf, q(tb)));
                edges.push(RawEdge::new(q(tb), EdgeKind::SubclassOf, q(a)));
                next += 4;
            }
        }
    }
    (OntoGraph::build(&edges, &FxHashMap::default()), n_loops)
}

/// Scale-benchmark fixture parameters.
#[derive(Debug, Clone)]
pub struct ScaleSpec {
    pub seed: u64,
    pub n_classes: u64,
    pub n_items: u64,
    pub instance_edges: u64,
    pub subclass_edges: u64,
    /// Direct and via-subclass self loops sprinkled in for the detectors.
    pub self_loops: u64,
}

impl ScaleSpec {
    /// The acceptance-scale graph: 10M instance edges, 1M subclass edges.
    pub fn acceptance() -> ScaleSpec {
        ScaleSpec {
            seed: 20_240_617,
            n_classes: 1_000_000,
            n_items: 10_000_000,
            instance_edges: 10_000_000,
            subclass_edges: 1_000_000,
            self_loops: 200,
        }
    }

    /// A smaller variant for the bench suite.
    pub fn bench(scale_down: u64) -> ScaleSpec {
        let d = scale_down.max(1);
        ScaleSpec {
            seed: 20_240_617,
            n_classes: 1_000_000 / d,
            n_items: 10_000_000 / d,
            instance_edges: 10_000_000 / d,
            subclass_edges: 1_000_000 / d,
            self_loops: 200 / d.min(100),
        }
    }
}

/// Deterministic synthetic edge stream: classes Q1..Qc in a forward subclass
/// forest, items instancing classes uniformly, plus injected loops.
pub fn scale_edges(spec: &ScaleSpec) -> Vec<RawEdge> {
    let mut rng = SplitMix64::new(spec.seed);
    let c = spec.n_classes;
    let mut edges = Vec::with_capacity((spec.instance_edges + spec.subclass_edges) as usize + 64);
    for _ in 0..spec.subclass_edges {
        let child = 2 + rng.below(c - 1);
        let parent = 1 + rng.below(child - 1);
        edges.push(RawEdge::new(q(child), EdgeKind::SubclassOf, q(parent)));
    }
    for i in 0..spec.instance_edges {
        let item = c + 1 + (i % spec.n_items);
        let class = 1 + rng.below(c);
        edges.push(RawEdge::new(q(item), EdgeKind::InstanceOf, q(class)));
    }
    for i in 0..spec.self_loops {
        let x = 1 + rng.below(c);
        if i % 2 == 0 {
            edges.push(RawEdge::new(q(x), EdgeKind::InstanceOf, q(x)));
        } else {
            // One instance hop to a fresh class that subclasses back.
            let fresh = c + spec.n_items + 1 + i;
            edges.push(RawEdge::new(q(x), EdgeKind::InstanceOf, q(fresh)));
            edges.push(RawEdge::new(q(fresh), EdgeKind::SubclassOf, q(x)));
        }
    }
    edges
}
