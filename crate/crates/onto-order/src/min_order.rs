//! Minimum-order level sets via instance chains.
//!
//! Level 1 is the class set under the chosen definition; each further level
//! lifts the previous one by one instance hop followed by subclass closure.
//! An entity in level n therefore heads an instance chain of length n-1
//! starting from a class, and its deepest level lower-bounds its fixed order.

use thiserror::Error;

use crate::census::{classes_bits, ClassDef};
use crate::graph::OntoGraph;
use crate::ids::EntityId;
use crate::par;
use crate::util::BitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MinOrderError {
    #[error("max level must be at least 1 (got {0})")]
    BadMaxLevel(usize),
}

/// Level sets L1..Lk. Levels are nested for the instance-only and any-of
/// class definitions (the measured ones); entities on instance cycles
/// saturate at the computed cap.
#[derive(Debug)]
pub struct MinOrderLevels {
    pub class_def: ClassDef,
    levels: Vec<Vec<EntityId>>,
}

impl MinOrderLevels {
    /// Members of level `n` (1-based), ascending by id.
    pub fn level(&self, n: usize) -> &[EntityId] {
        &self.levels[n - 1]
    }

    pub fn max_level(&self) -> usize {
        self.levels.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

/// Computes L1..Lk by frontier iteration with per-level deduplication.
pub fn min_order_levels(
    g: &OntoGraph,
    def: ClassDef,
    k: usize,
) -> Result<MinOrderLevels, MinOrderError> {
    if k < 1 {
        return Err(MinOrderError::BadMaxLevel(k));
    }
    let mut levels = Vec::with_capacity(k);
    let mut current = classes_bits(g, def);
    levels.push(g.ids_of(&current));
    for _ in 1..k {
        current = lift(g, &current);
        levels.push(g.ids_of(&current));
    }
    Ok(MinOrderLevels {
        class_def: def,
        levels,
    })
}

/// One instance hop from every member, then subclass closure.
fn lift(g: &OntoGraph, level: &BitSet) -> BitSet {
    let members: Vec<u32> = level.ones().collect();
    let mut targets = par::flat_map_collect(&members, |&m| g.instance_targets(m).to_vec());
    par::sort(&mut targets);
    targets.dedup();
    g.close_up(targets)
}

/// Largest computed level containing `x`; 0 when `x` is not a class under
/// the levels' definition (or unknown).
pub fn min_order_of(levels: &MinOrderLevels, x: EntityId) -> usize {
    (1..=levels.max_level())
        .rev()
        .find(|&n| levels.level(n).binary_search(&x).is_ok())
        .unwrap_or(0)
}
