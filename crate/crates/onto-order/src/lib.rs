//! Class-order diagnostics for instance-of/subclass-of ontologies.
//!
//! Ingests edge dumps (TSV or a filtered N-Triples subset) into an immutable
//! dual-relation graph and detects class-order problems at scale: order
//! conflicts derived from the universal fixed-order classes, impossible
//! minimum orders from instance chains, split-order classes, instance loops,
//! and metaclass-property inconsistencies. Produces deterministic CSV/JSON
//! reports and QuickStatements fix batches.
//!
//! Module map:
//!
//! * [`ingest`] — streaming dump parsing into interned edge lists.
//! * [`graph`] — the [`graph::OntoGraph`] closure primitives and SCC
//!   condensation.
//! * [`census`] — class definitions, counts, count-by-subclass.
//! * [`fixed_order`] — order derivation, conflicts, metaclass checks.
//! * [`min_order`] — minimum-order level sets via instance chains.
//! * [`split_order`] — split-order pair detection, exclusion, histogram.
//! * [`loops`] — instance-loop detectors and the poisoned-class fixed point.
//! * [`fixes`] — loop-break proposals and QuickStatements serialization.
//! * [`reports`] — result-set diffs and deterministic report envelopes.
//! * [`oracle`] — brute-force reference implementations and seeded fixtures.
//!
//! The `parallel` feature (on by default) runs the analyses on a rayon pool;
//! without it everything falls back to sequential iteration with identical
//! output.

pub mod census;
pub mod fixed_order;
pub mod fixes;
pub mod graph;
pub mod ids;
pub mod ingest;
pub mod loops;
pub mod min_order;
pub mod oracle;
mod par;
pub mod reports;
pub mod split_order;
mod util;

pub use census::{census_counts, classes, count_by_subclass, CensusCounts, ClassDef, ClassSelector};
pub use fixed_order::{
    check_metaclass_edges, derive_orders, order_conflicts, order_overlap, OrderAssignment,
    OrderSet, UniversalOrderClasses,
};
pub use fixes::{emit_quickstatements, propose_loop_breaks, FixOp, FixStatement};
pub use graph::{GraphError, OntoGraph, SccIndex};
pub use ids::{EntityId, EdgeKind, PropertyId, RawEdge};
pub use ingest::{parse_edge_file, render_tsv, InputFormat, ParseStats, ParsedInput};
pub use loops::{
    find_longer_loops, find_self_loops, find_two_hop_loops, find_two_hop_loops_direct,
    loop_affected_classes, LoopKind, LoopRecord,
};
pub use min_order::{min_order_levels, min_order_of, MinOrderLevels};
pub use reports::{diff_sets, write_report, DiffResult, ReportMeta, ReportTable, ResultSet};
pub use split_order::{
    split_classes, split_exclusions, split_histogram, split_pairs_raw, split_reduced,
    split_reduced_fixpoint, HistogramRow, SplitCase, SplitPair,
};
pub use util::fnv1a64;
