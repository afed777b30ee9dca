//! Instance-loop detection and the classes loops poison.
//!
//! An entity in an instance loop has an infinite descending instance chain,
//! so every class typed through it loses its fixed order. Detectors:
//!
//! * self loops — directly (`x P31 x`) or via one instance hop and one or
//!   more subclass hops back;
//! * two-hop loops — mutual membership under closure semantics (each hop one
//!   instance edge then subclass closure), with a direct-edge-only variant;
//! * longer cycles — components of the typed-by relation with three or more
//!   instance hops, reported with their full member lists.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::graph::{strongly_connected, GraphError, OntoGraph};
use crate::ids::{EdgeKind, EntityId, RawEdge};
use crate::par;
use crate::util::BitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoopsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LoopKind {
    /// `x P31 x`.
    SelfDirect,
    /// `x P31 y` with a subclass path from y back to x.
    SelfViaSubclass,
    /// Mutual (or longer) typing cycles through two or more instance hops.
    TwoHop,
}

impl LoopKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LoopKind::SelfDirect => "self-direct",
            LoopKind::SelfViaSubclass => "self-via-subclass",
            LoopKind::TwoHop => "two-hop",
        }
    }

    pub fn from_name(s: &str) -> Option<LoopKind> {
        match s {
            "self-direct" => Some(LoopKind::SelfDirect),
            "self-via-subclass" => Some(LoopKind::SelfViaSubclass),
            "two-hop" => Some(LoopKind::TwoHop),
            _ => None,
        }
    }
}

/// A detected loop: its members (instance-hop sources) and one realizing
/// closed edge walk starting and ending at the first member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LoopRecord {
    pub kind: LoopKind,
    pub members: Vec<EntityId>,
    pub edges: Vec<RawEdge>,
}

impl LoopRecord {
    /// Replays the edge walk: every edge must exist and the walk must return
    /// to its starting entity while visiting every member.
    pub fn replays_on(&self, g: &OntoGraph) -> bool {
        let Some(first) = self.edges.first() else {
            return false;
        };
        let mut at = first.subject;
        for e in &self.edges {
            if e.subject != at || !g.has_edge(*e) {
                return false;
            }
            at = e.object;
        }
        at == first.subject && self.members.iter().all(|m| {
            self.edges.iter().any(|e| e.subject == *m)
        })
    }
}

/// All self instance loops, one record per member, sorted. A direct
/// `x P31 x` edge takes precedence over via-subclass realizations.
pub fn find_self_loops(g: &OntoGraph) -> Vec<LoopRecord> {
    let n = g.n_entities();
    let mut records: Vec<LoopRecord> = Vec::new();

    let mut direct = BitSet::new(n);
    for x in 0..n as u32 {
        if g.instance_targets(x).binary_search(&x).is_ok() {
            direct.insert(x);
            let id = g.id(x);
            records.push(LoopRecord {
                kind: LoopKind::SelfDirect,
                members: vec![id],
                edges: vec![RawEdge::new(id, EdgeKind::InstanceOf, id)],
            });
        }
    }

    // Via subclass: for each distinct instance target y, walk upward from
    // y's superclasses and intersect with y's direct instances.
    let targets: Vec<u32> = (0..n as u32)
        .filter(|&y| !g.instance_sources(y).is_empty())
        .collect();
    let candidates: Vec<(u32, u32, u32)> = par::flat_map_collect(&targets, |&y| {
        let (depth_of, _) = bfs_up(g, y);
        g.instance_sources(y)
            .iter()
            .filter_map(|&x| depth_of.get(&x).map(|&d| (x, d, y)))
            .collect()
    });

    // One record per member: shortest subclass path, ties by smallest target.
    let mut best: FxHashMap<u32, (u32, u32)> = FxHashMap::default();
    for (x, depth, y) in candidates {
        if direct.contains(x) {
            continue;
        }
        let entry = best.entry(x).or_insert((depth, y));
        if (depth, y) < *entry {
            *entry = (depth, y);
        }
    }
    let mut via: Vec<(u32, u32)> = best.into_iter().map(|(x, (_, y))| (x, y)).collect();
    via.sort_unstable();
    for (x, y) in via {
        let (_, parents) = bfs_up(g, y);
        let mut edges = vec![RawEdge::new(g.id(x), EdgeKind::InstanceOf, g.id(y))];
        edges.extend(subclass_path(g, y, x, &parents));
        records.push(LoopRecord {
            kind: LoopKind::SelfViaSubclass,
            members: vec![g.id(x)],
            edges,
        });
    }

    records.sort_unstable();
    records
}

/// Level-synchronous upward BFS from y's direct superclasses; returns the
/// subclass-hop depth per reached node and the BFS parents. Deterministic:
/// sorted adjacency, first parent wins.
fn bfs_up(g: &OntoGraph, y: u32) -> (FxHashMap<u32, u32>, FxHashMap<u32, u32>) {
    let mut depth_of: FxHashMap<u32, u32> = FxHashMap::default();
    let mut parents: FxHashMap<u32, u32> = FxHashMap::default();
    let mut frontier: Vec<u32> = Vec::new();
    for &p in g.subclass_targets(y) {
        depth_of.entry(p).or_insert_with(|| {
            parents.insert(p, y);
            frontier.push(p);
            1
        });
    }
    let mut depth = 1;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in g.subclass_targets(v) {
                depth_of.entry(w).or_insert_with(|| {
                    parents.insert(w, v);
                    next.push(w);
                    depth
                });
            }
        }
        frontier = next;
    }
    (depth_of, parents)
}

/// Subclass edge sequence from `from` to `to` following BFS parents of a
/// walk rooted at `from`.
fn subclass_path(
    g: &OntoGraph,
    from: u32,
    to: u32,
    parents: &FxHashMap<u32, u32>,
) -> Vec<RawEdge> {
    let mut chain = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parents[&cur];
        chain.push(cur);
    }
    chain.reverse();
    chain
        .windows(2)
        .map(|w| RawEdge::new(g.id(w[0]), EdgeKind::SubclassOf, g.id(w[1])))
        .collect()
}

/// Member sets of mixed-edge strongly connected components: per component,
/// the entities with an instance edge into the same component. These are
/// exactly the entities on typing cycles.
fn cycle_components(g: &OntoGraph) -> Vec<Vec<u32>> {
    let n = g.n_entities();
    let union = g.union_adjacency();
    let comp_of = strongly_connected(n, |v| union.neighbors(v));
    let n_comps = comp_of.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); n_comps];
    for x in 0..n as u32 {
        let cx = comp_of[x as usize];
        if g.instance_targets(x)
            .iter()
            .any(|&t| comp_of[t as usize] == cx)
        {
            members[cx as usize].push(x);
        }
    }
    members.retain(|m| !m.is_empty());
    members.sort_unstable();
    members
}

/// Typed-by set of x under closure semantics.
fn type_sparse(g: &OntoGraph, x: u32) -> rustc_hash::FxHashSet<u32> {
    g.close_up_sparse(g.instance_targets(x).iter().copied())
}

/// Unordered pairs {a, b} where each is typed by the other (one instance hop
/// then subclass closure per direction), sorted.
pub fn find_two_hop_loops(g: &OntoGraph) -> Vec<LoopRecord> {
    let comps = cycle_components(g);
    let mut records = par::flat_map_collect(&comps, |members| {
        let mut out = Vec::new();
        let types: Vec<_> = members.iter().map(|&m| type_sparse(g, m)).collect();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let (a, b) = (members[i], members[j]);
                if types[i].contains(&b) && types[j].contains(&a) {
                    out.push(two_hop_record(g, a, b));
                }
            }
        }
        out
    });
    records.sort_unstable();
    records
}

fn two_hop_record(g: &OntoGraph, a: u32, b: u32) -> LoopRecord {
    let mut edges = typing_walk(g, a, b);
    edges.extend(typing_walk(g, b, a));
    LoopRecord {
        kind: LoopKind::TwoHop,
        members: vec![g.id(a), g.id(b)],
        edges,
    }
}

/// One instance hop from `from` followed by the shortest subclass path to
/// `to`; smallest qualifying instance target wins.
fn typing_walk(g: &OntoGraph, from: u32, to: u32) -> Vec<RawEdge> {
    for &t in g.instance_targets(from) {
        if t == to {
            return vec![RawEdge::new(g.id(from), EdgeKind::InstanceOf, g.id(to))];
        }
        let (depth_of, parents) = bfs_up(g, t);
        if depth_of.contains_key(&to) {
            let mut edges = vec![RawEdge::new(g.id(from), EdgeKind::InstanceOf, g.id(t))];
            edges.extend(subclass_path(g, t, to, &parents));
            return edges;
        }
    }
    unreachable!("typing_walk requires `to` to be in from's type set");
}

/// Direct-edge variant: mutual `P31` pairs only.
pub fn find_two_hop_loops_direct(g: &OntoGraph) -> Vec<LoopRecord> {
    let n = g.n_entities();
    let mut records = Vec::new();
    for a in 0..n as u32 {
        for &b in g.instance_targets(a) {
            if b > a && g.instance_targets(b).binary_search(&a).is_ok() {
                records.push(LoopRecord {
                    kind: LoopKind::TwoHop,
                    members: vec![g.id(a), g.id(b)],
                    edges: vec![
                        RawEdge::new(g.id(a), EdgeKind::InstanceOf, g.id(b)),
                        RawEdge::new(g.id(b), EdgeKind::InstanceOf, g.id(a)),
                    ],
                });
            }
        }
    }
    records
}

/// Typing cycles through three or more instance hops, one record per
/// component, members being the instance-hop sources.
pub fn find_longer_loops(g: &OntoGraph) -> Vec<LoopRecord> {
    let comps = cycle_components(g);
    let mut records: Vec<LoopRecord> = comps
        .iter()
        .filter(|m| m.len() >= 3)
        .map(|members| {
            let mut edges = Vec::new();
            for i in 0..members.len() {
                let from = members[i];
                let to = members[(i + 1) % members.len()];
                edges.extend(typing_walk_mixed(g, from, to));
            }
            LoopRecord {
                kind: LoopKind::TwoHop,
                members: members.iter().map(|&m| g.id(m)).collect(),
                edges,
            }
        })
        .collect();
    records.sort_unstable();
    records
}

/// Shortest mixed-edge walk from `from` to `to` whose first hop is an
/// instance edge. BFS with sorted adjacency keeps it deterministic.
fn typing_walk_mixed(g: &OntoGraph, from: u32, to: u32) -> Vec<RawEdge> {
    debug_assert_ne!(from, to);
    let mut parents: FxHashMap<u32, (u32, EdgeKind)> = FxHashMap::default();
    let mut frontier: Vec<u32> = Vec::new();
    for &t in g.instance_targets(from) {
        parents.entry(t).or_insert_with(|| {
            frontier.push(t);
            (from, EdgeKind::InstanceOf)
        });
    }
    while !parents.contains_key(&to) {
        debug_assert!(!frontier.is_empty(), "walk target must be reachable");
        let mut next = Vec::new();
        for &v in &frontier {
            let mixed = g
                .instance_targets(v)
                .iter()
                .map(|&w| (w, EdgeKind::InstanceOf))
                .chain(
                    g.subclass_targets(v)
                        .iter()
                        .map(|&w| (w, EdgeKind::SubclassOf)),
                );
            for (w, kind) in mixed {
                parents.entry(w).or_insert_with(|| {
                    next.push(w);
                    (v, kind)
                });
            }
        }
        frontier = next;
    }
    let mut rev = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, kind) = parents[&cur];
        rev.push(RawEdge::new(g.id(p), kind, g.id(cur)));
        cur = p;
    }
    rev.reverse();
    rev
}

/// Least fixed point of S ← S ∪ {c : ∃x ∈ S, c ∈ type_set(x)} from `seeds`:
/// every class with an infinite descending instance chain through a seed.
pub fn loop_affected_classes(
    g: &OntoGraph,
    seeds: &[EntityId],
) -> Result<Vec<EntityId>, LoopsError> {
    let mut in_set = BitSet::new(g.n_entities());
    let mut frontier = Vec::with_capacity(seeds.len());
    for &s in seeds {
        let ix = g.ix(s)?;
        if in_set.insert(ix) {
            frontier.push(ix);
        }
    }
    while !frontier.is_empty() {
        let mut targets = par::flat_map_collect(&frontier, |&x| g.instance_targets(x).to_vec());
        par::sort(&mut targets);
        targets.dedup();
        let closed = g.close_up(targets);
        frontier = closed.ones().filter(|&c| in_set.insert(c)).collect();
    }
    Ok(g.ids_of(&in_set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::OntoGraph;
    use crate::ids::q;
    use crate::oracle;

    fn graph(inst: &[(u64, u64)], sub: &[(u64, u64)]) -> OntoGraph {
        oracle::graph_from_pairs(inst, sub)
    }

    #[test]
    fn g1_self_loops() {
        let g = oracle::fixture_g1();
        let loops = find_self_loops(&g);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].kind, LoopKind::SelfDirect);
        assert_eq!(loops[0].members, vec![q(5)]);
        assert_eq!(
            loops[0].edges,
            vec![RawEdge::new(q(5), EdgeKind::InstanceOf, q(5))]
        );
        assert!(loops[0].replays_on(&g));
    }

    #[test]
    fn self_via_subclass_found_with_path() {
        // Q1 ∈ Q2, Q2 ⊑ Q3 ⊑ Q1.
        let g = graph(&[(1, 2)], &[(2, 3), (3, 1)]);
        let loops = find_self_loops(&g);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].kind, LoopKind::SelfViaSubclass);
        assert_eq!(loops[0].members, vec![q(1)]);
        assert_eq!(
            loops[0].edges,
            vec![
                RawEdge::new(q(1), EdgeKind::InstanceOf, q(2)),
                RawEdge::new(q(2), EdgeKind::SubclassOf, q(3)),
                RawEdge::new(q(3), EdgeKind::SubclassOf, q(1)),
            ]
        );
        assert!(loops[0].replays_on(&g));
    }

    #[test]
    fn acyclic_instance_dag_is_clean() {
        let g = graph(&[(1, 2), (2, 3)], &[(4, 5)]);
        assert!(find_self_loops(&g).is_empty());
        assert!(find_two_hop_loops(&g).is_empty());
        assert!(find_longer_loops(&g).is_empty());
    }

    #[test]
    fn g1_two_hop() {
        let g = oracle::fixture_g1();
        let loops = find_two_hop_loops(&g);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].members, vec![q(6), q(7)]);
        assert!(loops[0].replays_on(&g));
        // Direct-edge variant agrees here.
        assert_eq!(find_two_hop_loops_direct(&g), loops);
    }

    #[test]
    fn asymmetric_instance_is_not_a_loop() {
        let g = graph(&[(1, 2)], &[]);
        assert!(find_two_hop_loops(&g).is_empty());
    }

    #[test]
    fn two_hop_via_closure_only() {
        // Q1 ∈ Q2; Q2 ∈ Q3; Q3 ⊑ Q1: {Q1,Q2} mutual only under closure.
        let g = graph(&[(1, 2), (2, 3)], &[(3, 1)]);
        let loops = find_two_hop_loops(&g);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].members, vec![q(1), q(2)]);
        assert!(loops[0].replays_on(&g));
        assert!(find_two_hop_loops_direct(&g).is_empty());
    }

    #[test]
    fn three_cycle_detected_as_longer_loop() {
        // a=1 ∈ 10 ⊑ b=2 ∈ 20 ⊑ c=3 ∈ 30 ⊑ 1; no mutual pair.
        let g = graph(&[(1, 10), (2, 20), (3, 30)], &[(10, 2), (20, 3), (30, 1)]);
        assert!(find_two_hop_loops(&g).is_empty());
        let loops = find_longer_loops(&g);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].members, vec![q(1), q(2), q(3)]);
        assert!(loops[0].replays_on(&g));
    }

    #[test]
    fn g1_affected_classes() {
        let g = oracle::fixture_g1();
        assert_eq!(loop_affected_classes(&g, &[q(5)]).unwrap(), vec![q(5)]);
        assert_eq!(loop_affected_classes(&g, &[]).unwrap(), vec![]);
        assert!(loop_affected_classes(&g, &[q(404)]).is_err());
    }

    #[test]
    fn affected_closes_upward_through_types() {
        // Seed Q1 ∈ Q2 ⊑ Q3; Q3 ∈ Q4.
        let g = graph(&[(1, 2), (3, 4)], &[(2, 3)]);
        assert_eq!(
            loop_affected_classes(&g, &[q(1)]).unwrap(),
            vec![q(1), q(2), q(3), q(4)]
        );
    }

    #[test]
    fn self_loop_members_appear_in_split_pairs() {
        let g = oracle::fixture_g1();
        let raw = crate::split_order::split_pairs_raw(&g);
        for rec in find_self_loops(&g) {
            let m = rec.members[0];
            assert!(raw.iter().any(|p| p.c == m && p.s == m));
        }
    }
}
