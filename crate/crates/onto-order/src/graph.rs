//! Immutable dual-relation graph and its closure primitives.
//!
//! [`OntoGraph`] stores forward and reverse adjacency for the instance-of and
//! subclass-of relations in CSR form over dense indexes. All analyses share
//! it read-only; the closure helpers (`up_set`, `down_set`, `type_set`)
//! implement the reflexive-transitive `P279*` semantics every query composes,
//! for every entity, class or not. Subclass cycles are legal input;
//! [`SccIndex`] provides the acyclic condensation when reachability needs to
//! be batched.

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::ids::{EdgeKind, EntityId, RawEdge};
use crate::par;
use crate::util::BitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
}

/// Compressed adjacency: `items[off[i]..off[i+1]]` are `i`'s neighbors,
/// sorted and duplicate-free.
#[derive(Debug, Default)]
pub(crate) struct Csr {
    off: Vec<u32>,
    dst: Vec<u32>,
}

impl Csr {
    fn build(n: usize, pairs: impl Iterator<Item = (u32, u32)> + Clone) -> Csr {
        let mut deg = vec![0u32; n + 1];
        for (src, _) in pairs.clone() {
            deg[src as usize + 1] += 1;
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut dst = vec![0u32; deg[n] as usize];
        let mut cursor = deg.clone();
        for (src, d) in pairs {
            dst[cursor[src as usize] as usize] = d;
            cursor[src as usize] += 1;
        }
        for i in 0..n {
            dst[deg[i] as usize..deg[i + 1] as usize].sort_unstable();
        }
        Csr { off: deg, dst }
    }

    pub(crate) fn neighbors(&self, i: u32) -> &[u32] {
        &self.dst[self.off[i as usize] as usize..self.off[i as usize + 1] as usize]
    }

    fn len(&self) -> usize {
        self.dst.len()
    }
}

#[derive(Debug, Default)]
struct Relation {
    fwd: Csr,
    rev: Csr,
}

/// Immutable instance-of/subclass-of graph with optional labels.
#[derive(Debug, Default)]
pub struct OntoGraph {
    ids: Vec<EntityId>,
    index: FxHashMap<EntityId, u32>,
    instance: Relation,
    subclass: Relation,
    labels: FxHashMap<u32, String>,
}

impl OntoGraph {
    /// Builds the graph from interned edges. The entity universe is every id
    /// appearing in an edge or carrying a label; dense indexes follow
    /// ascending id order so index order and id order agree everywhere.
    pub fn build(edges: &[RawEdge], labels: &FxHashMap<EntityId, String>) -> OntoGraph {
        let mut ids: Vec<EntityId> = Vec::with_capacity(edges.len() * 2 + labels.len());
        for e in edges {
            ids.push(e.subject);
            ids.push(e.object);
        }
        ids.extend(labels.keys().copied());
        par::sort(&mut ids);
        ids.dedup();

        let index: FxHashMap<EntityId, u32> = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as u32))
            .collect();
        let n = ids.len();

        let mut inst: Vec<(u32, u32)> = Vec::new();
        let mut sub: Vec<(u32, u32)> = Vec::new();
        for e in edges {
            let pair = (index[&e.subject], index[&e.object]);
            match e.kind {
                EdgeKind::InstanceOf => inst.push(pair),
                EdgeKind::SubclassOf => sub.push(pair),
            }
        }
        inst.sort_unstable();
        inst.dedup();
        sub.sort_unstable();
        sub.dedup();

        let build_rel = |pairs: &[(u32, u32)]| Relation {
            fwd: Csr::build(n, pairs.iter().copied()),
            rev: Csr::build(n, pairs.iter().map(|&(s, d)| (d, s))),
        };
        let labels = labels
            .iter()
            .map(|(id, text)| (index[id], text.clone()))
            .collect();

        OntoGraph {
            instance: build_rel(&inst),
            subclass: build_rel(&sub),
            ids,
            index,
            labels,
        }
    }

    pub fn n_entities(&self) -> usize {
        self.ids.len()
    }

    pub fn entities(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.ids.iter().copied()
    }

    pub fn contains(&self, e: EntityId) -> bool {
        self.index.contains_key(&e)
    }

    pub fn label(&self, e: EntityId) -> Option<&str> {
        let ix = self.index.get(&e)?;
        self.labels.get(ix).map(String::as_str)
    }

    pub fn edge_count(&self, kind: EdgeKind) -> usize {
        match kind {
            EdgeKind::InstanceOf => self.instance.fwd.len(),
            EdgeKind::SubclassOf => self.subclass.fwd.len(),
        }
    }

    pub fn has_edge(&self, e: RawEdge) -> bool {
        let (Some(&s), Some(&o)) = (self.index.get(&e.subject), self.index.get(&e.object)) else {
            return false;
        };
        let rel = match e.kind {
            EdgeKind::InstanceOf => &self.instance,
            EdgeKind::SubclassOf => &self.subclass,
        };
        rel.fwd.neighbors(s).binary_search(&o).is_ok()
    }

    /// Reconstructs the sorted edge list (mainly for rebuilding a graph with
    /// some edges removed).
    pub fn edges(&self) -> Vec<RawEdge> {
        let mut out = Vec::with_capacity(
            self.edge_count(EdgeKind::InstanceOf) + self.edge_count(EdgeKind::SubclassOf),
        );
        for s in 0..self.ids.len() as u32 {
            for &o in self.instance.fwd.neighbors(s) {
                out.push(RawEdge::new(self.id(s), EdgeKind::InstanceOf, self.id(o)));
            }
            for &o in self.subclass.fwd.neighbors(s) {
                out.push(RawEdge::new(self.id(s), EdgeKind::SubclassOf, self.id(o)));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn labels(&self) -> FxHashMap<EntityId, String> {
        self.labels
            .iter()
            .map(|(&ix, text)| (self.id(ix), text.clone()))
            .collect()
    }

    pub(crate) fn ix(&self, e: EntityId) -> Result<u32, GraphError> {
        self.index
            .get(&e)
            .copied()
            .ok_or(GraphError::UnknownEntity(e))
    }

    pub(crate) fn id(&self, ix: u32) -> EntityId {
        self.ids[ix as usize]
    }

    /// Classes `x` is directly an instance of.
    pub(crate) fn instance_targets(&self, ix: u32) -> &[u32] {
        self.instance.fwd.neighbors(ix)
    }

    /// Direct instances of class `ix`.
    pub(crate) fn instance_sources(&self, ix: u32) -> &[u32] {
        self.instance.rev.neighbors(ix)
    }

    /// Direct superclasses of `ix`.
    pub(crate) fn subclass_targets(&self, ix: u32) -> &[u32] {
        self.subclass.fwd.neighbors(ix)
    }

    /// Direct subclasses of `ix`.
    pub(crate) fn subclass_sources(&self, ix: u32) -> &[u32] {
        self.subclass.rev.neighbors(ix)
    }

    /// All entities reachable from `seeds` via zero or more subclass hops
    /// upward (toward superclasses). Includes the seeds.
    pub(crate) fn close_up(&self, seeds: impl IntoIterator<Item = u32>) -> BitSet {
        self.close(seeds, Direction::Up)
    }

    /// Dual of [`close_up`]: downward over subclass edges, toward subclasses.
    pub(crate) fn close_down(&self, seeds: impl IntoIterator<Item = u32>) -> BitSet {
        self.close(seeds, Direction::Down)
    }

    /// Sparse variant of [`close_up`]: memory proportional to the reached
    /// set, not the graph, for the many-small-closures access pattern.
    pub(crate) fn close_up_sparse(&self, seeds: impl IntoIterator<Item = u32>) -> FxHashSet<u32> {
        let mut visited = FxHashSet::default();
        let mut frontier: Vec<u32> = seeds.into_iter().filter(|&s| visited.insert(s)).collect();
        while let Some(v) = frontier.pop() {
            for &w in self.subclass.fwd.neighbors(v) {
                if visited.insert(w) {
                    frontier.push(w);
                }
            }
        }
        visited
    }

    fn close(&self, seeds: impl IntoIterator<Item = u32>, dir: Direction) -> BitSet {
        let mut visited = BitSet::new(self.ids.len());
        let mut frontier: Vec<u32> = seeds.into_iter().filter(|&s| visited.insert(s)).collect();
        while !frontier.is_empty() {
            let expanded = par::flat_map_collect(&frontier, |&v| {
                match dir {
                    Direction::Up => self.subclass.fwd.neighbors(v),
                    Direction::Down => self.subclass.rev.neighbors(v),
                }
                .to_vec()
            });
            frontier = expanded.into_iter().filter(|&w| visited.insert(w)).collect();
        }
        visited
    }

    pub(crate) fn ids_of(&self, set: &BitSet) -> Vec<EntityId> {
        set.ones().map(|ix| self.id(ix)).collect()
    }

    /// {y : x reaches y via zero or more subclass hops}; always contains x.
    pub fn up_set(&self, x: EntityId) -> Result<Vec<EntityId>, GraphError> {
        let ix = self.ix(x)?;
        Ok(self.ids_of(&self.close_up([ix])))
    }

    /// All subclasses of x, including x itself.
    pub fn down_set(&self, x: EntityId) -> Result<Vec<EntityId>, GraphError> {
        let ix = self.ix(x)?;
        Ok(self.ids_of(&self.close_down([ix])))
    }

    /// Every class x belongs to: one instance hop, then subclass closure.
    pub fn type_set(&self, x: EntityId) -> Result<Vec<EntityId>, GraphError> {
        let ix = self.ix(x)?;
        let targets: Vec<u32> = self.instance_targets(ix).to_vec();
        Ok(self.ids_of(&self.close_up(targets)))
    }

    /// Strongly connected components of the subclass relation plus the
    /// acyclic condensation, for batched reachability.
    pub fn scc_condense(&self) -> SccIndex<'_> {
        SccIndex::build(self)
    }

    /// Adjacency over both relations merged (instance-of and subclass-of
    /// edges together), used for cycle detection through mixed hops.
    pub(crate) fn union_adjacency(&self) -> Csr {
        let n = self.n_entities();
        let pairs = (0..n as u32).flat_map(|v| {
            self.instance
                .fwd
                .neighbors(v)
                .iter()
                .chain(self.subclass.fwd.neighbors(v))
                .map(move |&w| (v, w))
        });
        Csr::build(n, pairs)
    }
}

/// Iterative Tarjan over an arbitrary adjacency; returns component id per
/// node, ids assigned in completion order.
pub(crate) fn strongly_connected<'a>(n: usize, adj: impl Fn(u32) -> &'a [u32]) -> Vec<u32> {
    tarjan(n, adj)
}

#[derive(Clone, Copy)]
enum Direction {
    Up,
    Down,
}

/// Subclass-relation SCCs. Component ids are assigned in completion order,
/// so every condensation edge points from a larger id to a smaller one.
pub struct SccIndex<'g> {
    graph: &'g OntoGraph,
    comp_of: Vec<u32>,
    members: Vec<Vec<u32>>,
    cond: Vec<Vec<u32>>,
}

impl<'g> SccIndex<'g> {
    fn build(graph: &'g OntoGraph) -> SccIndex<'g> {
        let n = graph.n_entities();
        let comp_of = tarjan(n, |v| graph.subclass.fwd.neighbors(v));
        let n_comps = comp_of.iter().map(|&c| c as usize + 1).max().unwrap_or(0);

        let mut members = vec![Vec::new(); n_comps];
        for (v, &c) in comp_of.iter().enumerate() {
            members[c as usize].push(v as u32);
        }
        let mut cond = vec![Vec::new(); n_comps];
        for v in 0..n as u32 {
            let cv = comp_of[v as usize];
            for &w in graph.subclass.fwd.neighbors(v) {
                let cw = comp_of[w as usize];
                if cv != cw {
                    cond[cv as usize].push(cw);
                }
            }
        }
        for adj in &mut cond {
            adj.sort_unstable();
            adj.dedup();
        }
        SccIndex {
            graph,
            comp_of,
            members,
            cond,
        }
    }

    pub fn component_count(&self) -> usize {
        self.members.len()
    }

    pub fn component_of(&self, e: EntityId) -> Result<u32, GraphError> {
        Ok(self.comp_of[self.graph.ix(e)? as usize])
    }

    pub fn component_members(&self, comp: u32) -> Vec<EntityId> {
        self.members[comp as usize]
            .iter()
            .map(|&ix| self.graph.id(ix))
            .collect()
    }

    pub(crate) fn member_ixs(&self, comp: u32) -> &[u32] {
        &self.members[comp as usize]
    }

    /// Condensation successors (toward superclasses).
    pub fn condensation_successors(&self, comp: u32) -> &[u32] {
        &self.cond[comp as usize]
    }

    /// True when the condensation admits a topological order, i.e. is acyclic.
    /// Holds by construction: Tarjan completes successors first.
    pub fn condensation_is_acyclic(&self) -> bool {
        self.cond
            .iter()
            .enumerate()
            .all(|(c, adj)| adj.iter().all(|&s| (s as usize) < c))
    }

    /// Components reachable from `comp` via zero or more condensation edges.
    pub(crate) fn reachable_components(&self, comp: u32) -> Vec<u32> {
        let mut seen = BitSet::new(self.members.len());
        let mut stack = vec![comp];
        seen.insert(comp);
        while let Some(c) = stack.pop() {
            for &s in &self.cond[c as usize] {
                if seen.insert(s) {
                    stack.push(s);
                }
            }
        }
        seen.ones().collect()
    }

    /// `up_set` evaluated through the condensation; equals the BFS route.
    pub fn up_set_via(&self, x: EntityId) -> Result<Vec<EntityId>, GraphError> {
        let comp = self.component_of(x)?;
        let mut out: Vec<EntityId> = self
            .reachable_components(comp)
            .into_iter()
            .flat_map(|c| self.members[c as usize].iter().map(|&ix| self.graph.id(ix)))
            .collect();
        out.sort_unstable();
        Ok(out)
    }
}

/// Iterative Tarjan over `adj`; returns the component id per node.
fn tarjan<'a>(n: usize, adj: impl Fn(u32) -> &'a [u32]) -> Vec<u32> {
    const UNSET: u32 = u32::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp_of = vec![UNSET; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut next_comp = 0u32;
    // (node, position in its adjacency list)
    let mut work: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNSET {
            continue;
        }
        work.push((root, 0));
        while let Some(&mut (v, ref mut ai)) = work.last_mut() {
            if *ai == 0 {
                index[v as usize] = next_index;
                low[v as usize] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v as usize] = true;
            }
            let neighbors = adj(v);
            if let Some(&w) = neighbors.get(*ai) {
                *ai += 1;
                if index[w as usize] == UNSET {
                    work.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent as usize] = low[parent as usize].min(low[v as usize]);
                }
                if low[v as usize] == index[v as usize] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        comp_of[w as usize] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp_of
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::q;
    use crate::oracle;

    fn idset(v: &[u64]) -> Vec<EntityId> {
        v.iter().map(|&n| q(n)).collect()
    }

    #[test]
    fn empty_graph() {
        let g = OntoGraph::build(&[], &FxHashMap::default());
        assert_eq!(g.n_entities(), 0);
        assert_eq!(g.down_set(q(1)), Err(GraphError::UnknownEntity(q(1))));
    }

    #[test]
    fn g1_shape() {
        let g = oracle::fixture_g1();
        assert_eq!(g.n_entities(), 11);
        assert_eq!(g.edge_count(EdgeKind::InstanceOf), 8);
        assert_eq!(g.edge_count(EdgeKind::SubclassOf), 3);
    }

    #[test]
    fn duplicate_edges_are_idempotent() {
        let mut edges = oracle::fixture_g1_edges();
        edges.extend(oracle::fixture_g1_edges());
        let g = OntoGraph::build(&edges, &FxHashMap::default());
        assert_eq!(g.edge_count(EdgeKind::InstanceOf), 8);
        assert_eq!(g.edge_count(EdgeKind::SubclassOf), 3);
        assert_eq!(g.edges(), oracle::fixture_g1().edges());
    }

    #[test]
    fn g1_up_sets() {
        let g = oracle::fixture_g1();
        assert_eq!(g.up_set(q(10)).unwrap(), idset(&[1, 9, 10]));
        assert_eq!(g.up_set(q(4)).unwrap(), idset(&[4]));
    }

    #[test]
    fn g1_type_sets() {
        let g = oracle::fixture_g1();
        assert_eq!(g.type_set(q(11)).unwrap(), idset(&[1, 9]));
        assert_eq!(g.type_set(q(1)).unwrap(), idset(&[]));
        assert_eq!(g.type_set(q(5)).unwrap(), idset(&[5]));
    }

    #[test]
    fn g1_down_sets() {
        let g = oracle::fixture_g1();
        assert_eq!(g.down_set(q(1)).unwrap(), idset(&[1, 9, 10, 11]));
        assert_eq!(g.down_set(q(10)).unwrap(), idset(&[10]));
    }

    #[test]
    fn subclass_cycle_is_symmetric() {
        let edges = vec![
            RawEdge::new(q(1), EdgeKind::SubclassOf, q(2)),
            RawEdge::new(q(2), EdgeKind::SubclassOf, q(1)),
        ];
        let g = OntoGraph::build(&edges, &FxHashMap::default());
        assert_eq!(g.up_set(q(1)).unwrap(), idset(&[1, 2]));
        assert_eq!(g.up_set(q(2)).unwrap(), idset(&[1, 2]));
        let scc = g.scc_condense();
        assert_eq!(scc.component_count(), 1);
        assert_eq!(scc.component_members(0), idset(&[1, 2]));
    }

    #[test]
    fn g1_condensation_is_all_singletons() {
        let g = oracle::fixture_g1();
        let scc = g.scc_condense();
        assert_eq!(scc.component_count(), g.n_entities());
        assert!(scc.condensation_is_acyclic());
    }

    #[test]
    fn cycle_chain_condenses_acyclically() {
        // 3-cycle feeding a 2-chain.
        let edges = vec![
            RawEdge::new(q(1), EdgeKind::SubclassOf, q(2)),
            RawEdge::new(q(2), EdgeKind::SubclassOf, q(3)),
            RawEdge::new(q(3), EdgeKind::SubclassOf, q(1)),
            RawEdge::new(q(3), EdgeKind::SubclassOf, q(4)),
            RawEdge::new(q(4), EdgeKind::SubclassOf, q(5)),
        ];
        let g = OntoGraph::build(&edges, &FxHashMap::default());
        let scc = g.scc_condense();
        assert_eq!(scc.component_count(), 3);
        assert!(scc.condensation_is_acyclic());
        for e in g.entities() {
            assert_eq!(scc.up_set_via(e).unwrap(), g.up_set(e).unwrap());
        }
    }

    #[test]
    fn up_down_duality_on_g1() {
        let g = oracle::fixture_g1();
        for x in g.entities() {
            let up = g.up_set(x).unwrap();
            assert!(up.contains(&x));
            for y in up {
                assert!(g.down_set(y).unwrap().contains(&x));
            }
        }
    }

    #[test]
    fn labels_are_interned_into_the_universe() {
        let edges = vec![RawEdge::new(q(2), EdgeKind::InstanceOf, q(1))];
        let mut labels = FxHashMap::default();
        labels.insert(q(7), "isolated".to_owned());
        let g = OntoGraph::build(&edges, &labels);
        assert_eq!(g.n_entities(), 3);
        assert_eq!(g.label(q(7)), Some("isolated"));
        assert_eq!(g.up_set(q(7)).unwrap(), idset(&[7]));
    }
}
