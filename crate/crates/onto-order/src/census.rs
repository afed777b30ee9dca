//! Class census: which entities count as classes, under three definitions
//! and their union.
//!
//! The has-an-instance definition closes upward over subclass links (every
//! superclass of an instantiated class also has that instance), matching the
//! query semantics rather than the looser prose reading.

use crate::graph::{GraphError, OntoGraph};
use crate::ids::EntityId;
use crate::par;
use crate::util::BitSet;

/// `class (Q16889133)`, the default class of all classes.
pub const DEFAULT_CLASS_CLASS: EntityId = EntityId::new(16_889_133);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassSelector {
    /// Some entity is an instance of it (closed upward over subclass).
    HasInstance,
    /// It has an incoming or outgoing subclass edge.
    HasSubOrSuper,
    /// The configured class-of-classes is among its types.
    InstanceOfClassClass,
    /// Union of the other three.
    AnyOf,
}

/// A class definition: a selector plus the configurable class-of-classes id
/// used by [`ClassSelector::InstanceOfClassClass`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassDef {
    pub selector: ClassSelector,
    pub class_class: EntityId,
}

impl ClassDef {
    pub fn new(selector: ClassSelector) -> Self {
        ClassDef {
            selector,
            class_class: DEFAULT_CLASS_CLASS,
        }
    }

    pub fn with_class_class(selector: ClassSelector, class_class: EntityId) -> Self {
        ClassDef {
            selector,
            class_class,
        }
    }
}

pub(crate) fn classes_bits(g: &OntoGraph, def: ClassDef) -> BitSet {
    let n = g.n_entities();
    match def.selector {
        ClassSelector::HasInstance => {
            let targets =
                (0..n as u32).filter(|&ix| !g.instance_sources(ix).is_empty());
            g.close_up(targets)
        }
        ClassSelector::HasSubOrSuper => {
            let mut bits = BitSet::new(n);
            for ix in 0..n as u32 {
                if !g.subclass_targets(ix).is_empty() || !g.subclass_sources(ix).is_empty() {
                    bits.insert(ix);
                }
            }
            bits
        }
        ClassSelector::InstanceOfClassClass => {
            let mut bits = BitSet::new(n);
            // An absent class-of-classes is legal and selects nothing.
            if let Ok(cc) = g.ix(def.class_class) {
                let below = g.close_down([cc]);
                for d in below.ones() {
                    for &src in g.instance_sources(d) {
                        bits.insert(src);
                    }
                }
            }
            bits
        }
        ClassSelector::AnyOf => {
            let mut bits = classes_bits(
                g,
                ClassDef::with_class_class(ClassSelector::HasInstance, def.class_class),
            );
            bits.union_with(&classes_bits(
                g,
                ClassDef::with_class_class(ClassSelector::HasSubOrSuper, def.class_class),
            ));
            bits.union_with(&classes_bits(
                g,
                ClassDef::with_class_class(ClassSelector::InstanceOfClassClass, def.class_class),
            ));
            bits
        }
    }
}

/// The set of classes under `def`, ascending by id.
pub fn classes(g: &OntoGraph, def: ClassDef) -> Vec<EntityId> {
    g.ids_of(&classes_bits(g, def))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusCounts {
    pub has_instance: usize,
    pub has_sub_or_super: usize,
    pub instance_of_class_class: usize,
    pub any_of: usize,
}

/// Counts of the four class sets.
pub fn census_counts(g: &OntoGraph, class_class: EntityId) -> CensusCounts {
    let count = |sel| classes_bits(g, ClassDef::with_class_class(sel, class_class)).count_ones();
    CensusCounts {
        has_instance: count(ClassSelector::HasInstance),
        has_sub_or_super: count(ClassSelector::HasSubOrSuper),
        instance_of_class_class: count(ClassSelector::InstanceOfClassClass),
        any_of: count(ClassSelector::AnyOf),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubclassCount {
    pub subclass: EntityId,
    /// Distinct entities typed by this subclass via one instance hop and
    /// subclass closure.
    pub count: usize,
}

/// One row per direct subclass of `root`, counting its closure instances,
/// sorted descending by count (ties ascending by id).
pub fn count_by_subclass(
    g: &OntoGraph,
    root: EntityId,
) -> Result<Vec<SubclassCount>, GraphError> {
    let root_ix = g.ix(root)?;
    let subs: Vec<u32> = g.subclass_sources(root_ix).to_vec();
    let mut rows = par::map_collect(&subs, |&sub| {
        let below = g.close_down([sub]);
        let mut instances = BitSet::new(g.n_entities());
        for d in below.ones() {
            for &src in g.instance_sources(d) {
                instances.insert(src);
            }
        }
        SubclassCount {
            subclass: g.id(sub),
            count: instances.count_ones(),
        }
    });
    rows.sort_by(|a, b| b.count.cmp(&a.count).then(a.subclass.cmp(&b.subclass)));
    Ok(rows)
}
