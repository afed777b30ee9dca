//! Edit-batch proposals for breaking bad loops, serialized as
//! QuickStatements v1 text.
//!
//! Proposals are conservative: one removal per loop, no additions. The edge
//! choice is deterministic so batches are reproducible and reviewable.

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::graph::OntoGraph;
use crate::ids::{EdgeKind, EntityId, PropertyId, RawEdge};
use crate::loops::{LoopKind, LoopRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixesError {
    #[error("malformed batch line `{0}`")]
    BadLine(String),
}

/// Removals sort before additions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FixOp {
    Remove,
    Add,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixStatement {
    pub op: FixOp,
    pub subject: EntityId,
    pub property: PropertyId,
    pub object: EntityId,
}

impl FixStatement {
    pub fn remove_edge(e: RawEdge) -> FixStatement {
        FixStatement {
            op: FixOp::Remove,
            subject: e.subject,
            property: e.kind.property(),
            object: e.object,
        }
    }
}

/// The edge a loop-break removes: the direct self edge for `SelfDirect`,
/// otherwise the instance edge with the smallest (subject, object).
pub fn break_edge(rec: &LoopRecord) -> RawEdge {
    match rec.kind {
        LoopKind::SelfDirect => rec.edges[0],
        _ => rec
            .edges
            .iter()
            .copied()
            .filter(|e| e.kind == EdgeKind::InstanceOf)
            .min_by_key(|e| (e.subject, e.object))
            .expect("loop records carry at least one instance edge"),
    }
}

/// One removal per loop record not fully covered by `keep`. Duplicates
/// collapse; output is emit-ordered. Every removal references an edge
/// present in the graph.
pub fn propose_loop_breaks(
    g: &OntoGraph,
    loops: &[LoopRecord],
    keep: &[EntityId],
) -> Vec<FixStatement> {
    let out = propose_loop_breaks_unchecked(loops, keep);
    debug_assert!(out.iter().all(|f| {
        EdgeKind::from_property(f.property)
            .map(|kind| g.has_edge(RawEdge::new(f.subject, kind, f.object)))
            .unwrap_or(false)
    }));
    out
}

/// Same proposals derived from the records alone, for callers without the
/// source graph at hand.
pub fn propose_loop_breaks_unchecked(loops: &[LoopRecord], keep: &[EntityId]) -> Vec<FixStatement> {
    let keep: FxHashSet<EntityId> = keep.iter().copied().collect();
    let mut out: Vec<FixStatement> = loops
        .iter()
        .filter(|rec| !rec.members.iter().all(|m| keep.contains(m)))
        .map(|rec| FixStatement::remove_edge(break_edge(rec)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// QuickStatements v1 batch text: removals as `-Q<s>\tP<p>\tQ<o>`, additions
/// without the minus; lines sorted by (op, subject, property, object),
/// trailing newline.
pub fn emit_quickstatements(fixes: &[FixStatement]) -> String {
    let mut sorted = fixes.to_vec();
    sorted.sort_unstable();
    let mut out = String::new();
    for f in sorted {
        if f.op == FixOp::Remove {
            out.push('-');
        }
        out.push_str(&format!("{}\t{}\t{}\n", f.subject, f.property, f.object));
    }
    out
}

/// Parses batch text back into statements; inverse of
/// [`emit_quickstatements`] on its own output.
pub fn parse_quickstatements(text: &str) -> Result<Vec<FixStatement>, FixesError> {
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let (op, rest) = match line.strip_prefix('-') {
            Some(rest) => (FixOp::Remove, rest),
            None => (FixOp::Add, line),
        };
        let parsed = (|| {
            let mut fields = rest.split('\t');
            let subject: EntityId = fields.next()?.parse().ok()?;
            let property: PropertyId = fields.next()?.parse().ok()?;
            let object: EntityId = fields.next()?.parse().ok()?;
            if fields.next().is_some() {
                return None;
            }
            Some(FixStatement {
                op,
                subject,
                property,
                object,
            })
        })();
        match parsed {
            Some(f) => out.push(f),
            None => return Err(FixesError::BadLine(line.to_owned())),
        }
    }
    Ok(out)
}

/// Applies removal statements to a graph, returning the reduced graph.
/// Additions and non-edge properties are ignored.
pub fn apply_removals(g: &OntoGraph, fixes: &[FixStatement]) -> OntoGraph {
    let removals: FxHashSet<RawEdge> = fixes
        .iter()
        .filter(|f| f.op == FixOp::Remove)
        .filter_map(|f| {
            EdgeKind::from_property(f.property)
                .map(|kind| RawEdge::new(f.subject, kind, f.object))
        })
        .collect();
    let edges: Vec<RawEdge> = g
        .edges()
        .into_iter()
        .filter(|e| !removals.contains(e))
        .collect();
    OntoGraph::build(&edges, &g.labels())
}
