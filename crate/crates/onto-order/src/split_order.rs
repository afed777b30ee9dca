//! Split-order class detection.
//!
//! A pair (c, s) is split when c is a subclass of s (possibly trivially) and
//! c also reaches s through subclass*, instance, subclass*. Such an s cannot
//! have any fixed order. Detection evaluates the possibly-empty-path closure
//! natively in one pass; each pair still carries the first matching case tag
//! (`self`, `AB`, `C`, `D`) so reports stay comparable with the per-case
//! query split, which remains available for cross-checking.
//!
//! Exclusion discards pairs that reduce to a pair one subclass step closer:
//! a direct superclass of c forming a pair with the same s, or a direct
//! subclass of s forming a pair with the same c. Self pairs are never
//! excluded. Repairing the closer pair repairs the excluded one.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::graph::OntoGraph;
use crate::ids::EntityId;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SplitCase {
    /// c = s.
    SelfPair,
    /// subclass*, instance — the instance hop lands on s directly.
    Ab,
    /// instance first, then one or more subclass hops.
    C,
    /// both subclass segments nontrivial.
    D,
}

impl SplitCase {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitCase::SelfPair => "self",
            SplitCase::Ab => "AB",
            SplitCase::C => "C",
            SplitCase::D => "D",
        }
    }

    pub fn from_name(s: &str) -> Option<SplitCase> {
        match s {
            "self" => Some(SplitCase::SelfPair),
            "AB" => Some(SplitCase::Ab),
            "C" => Some(SplitCase::C),
            "D" => Some(SplitCase::D),
            _ => None,
        }
    }
}

/// A witness item c and the split-order class s it splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitPair {
    pub c: EntityId,
    pub s: EntityId,
    pub case: SplitCase,
}

/// All split pairs, sorted by (c, s). Enumeration runs per condensation
/// component of c, so mutually-subclassed witnesses share one closure pass.
pub fn split_pairs_raw(g: &OntoGraph) -> Vec<SplitPair> {
    let scc = g.scc_condense();
    let mut pairs = par::flat_map_range(scc.component_count(), |comp| {
        component_pairs(g, scc.member_ixs(comp as u32))
    });
    par::sort(&mut pairs);
    pairs
}

// Closures here are sparse (sized by their reach, not the graph): the
// enumeration visits every condensation component and dense scratch per
// component would be quadratic at dump scale.
fn component_pairs(g: &OntoGraph, members: &[u32]) -> Vec<SplitPair> {
    let up = g.close_up_sparse([members[0]]);
    let mut targets: Vec<u32> = up
        .iter()
        .flat_map(|&m| g.instance_targets(m).iter().copied())
        .collect();
    targets.sort_unstable();
    targets.dedup();
    if targets.is_empty() {
        return Vec::new();
    }
    let candidates = g.close_up_sparse(targets.iter().copied());
    let mut s_list: Vec<u32> = up
        .iter()
        .copied()
        .filter(|s| candidates.contains(s))
        .collect();
    s_list.sort_unstable();
    if s_list.is_empty() {
        return Vec::new();
    }

    let mut out = Vec::with_capacity(members.len() * s_list.len());
    for &c in members {
        // Lazily computed: instance hop from c itself, then subclass+.
        let mut from_c: Option<rustc_hash::FxHashSet<u32>> = None;
        for &s in &s_list {
            let case = if s == c {
                SplitCase::SelfPair
            } else if targets.binary_search(&s).is_ok() {
                SplitCase::Ab
            } else {
                let from_c = from_c.get_or_insert_with(|| {
                    let starts: Vec<u32> = g
                        .instance_targets(c)
                        .iter()
                        .flat_map(|&t| g.subclass_targets(t).iter().copied())
                        .collect();
                    g.close_up_sparse(starts)
                });
                if from_c.contains(&s) {
                    SplitCase::C
                } else {
                    SplitCase::D
                }
            };
            out.push(SplitPair {
                c: g.id(c),
                s: g.id(s),
                case,
            });
        }
    }
    out
}

/// Proper upward closure: one or more subclass hops from `x`.
fn up_plus(g: &OntoGraph, x: u32) -> FxHashSet<u32> {
    g.close_up_sparse(g.subclass_targets(x).iter().copied())
}

/// Per-case detection mirroring the four-way query split. Their union over
/// all cases equals [`split_pairs_raw`] as a pair set.
pub fn case_self_pairs(g: &OntoGraph) -> Vec<(EntityId, EntityId)> {
    let n = g.n_entities();
    par::flat_map_range(n, |c| {
        let c = c as u32;
        let up = g.close_up_sparse([c]);
        let targets: Vec<u32> = up
            .iter()
            .flat_map(|&m| g.instance_targets(m).iter().copied())
            .collect();
        if g.close_up_sparse(targets).contains(&c) {
            vec![(g.id(c), g.id(c))]
        } else {
            Vec::new()
        }
    })
}

pub fn case_ab_pairs(g: &OntoGraph) -> Vec<(EntityId, EntityId)> {
    per_entity_pairs(g, |c, proper_up| {
        g.close_up_sparse([c])
            .iter()
            .flat_map(|&m| g.instance_targets(m).iter().copied())
            .filter(|t| proper_up.contains(t))
            .collect()
    })
}

pub fn case_c_pairs(g: &OntoGraph) -> Vec<(EntityId, EntityId)> {
    per_entity_pairs(g, |c, proper_up| {
        let starts: Vec<u32> = g
            .instance_targets(c)
            .iter()
            .flat_map(|&t| g.subclass_targets(t).iter().copied())
            .collect();
        g.close_up_sparse(starts)
            .into_iter()
            .filter(|s| proper_up.contains(s))
            .collect()
    })
}

pub fn case_d_pairs(g: &OntoGraph) -> Vec<(EntityId, EntityId)> {
    per_entity_pairs(g, |_c, proper_up| {
        let starts: Vec<u32> = proper_up
            .iter()
            .flat_map(|&m| g.instance_targets(m).iter().copied())
            .flat_map(|t| g.subclass_targets(t).iter().copied())
            .collect();
        g.close_up_sparse(starts)
            .into_iter()
            .filter(|s| proper_up.contains(s))
            .collect()
    })
}

fn per_entity_pairs(
    g: &OntoGraph,
    f: impl Fn(u32, &FxHashSet<u32>) -> Vec<u32> + Sync + Send,
) -> Vec<(EntityId, EntityId)> {
    par::flat_map_range(g.n_entities(), |c| {
        let c = c as u32;
        let proper_up = up_plus(g, c);
        let mut hits = f(c, &proper_up);
        hits.sort_unstable();
        hits.dedup();
        hits.into_iter().map(|s| (g.id(c), g.id(s))).collect()
    })
}

/// The subset of `raw` to discard: pairs reducible to a pair one subclass
/// step closer. Requires `raw` to be the full raw set for `g`.
pub fn split_exclusions(g: &OntoGraph, raw: &[SplitPair]) -> Vec<SplitPair> {
    let members: FxHashSet<(EntityId, EntityId)> = raw.iter().map(|p| (p.c, p.s)).collect();
    par::flat_map_collect(raw, |&p| {
        if p.c == p.s {
            return Vec::new();
        }
        let (Ok(cix), Ok(six)) = (g.ix(p.c), g.ix(p.s)) else {
            return Vec::new();
        };
        let via_superclass = g
            .subclass_targets(cix)
            .iter()
            .any(|&cp| members.contains(&(g.id(cp), p.s)));
        let via_subclass = || {
            g.subclass_sources(six)
                .iter()
                .any(|&sp| g.id(sp) != p.c && members.contains(&(p.c, g.id(sp))))
        };
        if via_superclass || via_subclass() {
            vec![p]
        } else {
            Vec::new()
        }
    })
}

/// Splits `raw` into (retained, excluded) with one round of exclusion.
pub fn split_reduced(g: &OntoGraph, raw: &[SplitPair]) -> (Vec<SplitPair>, Vec<SplitPair>) {
    let excluded = split_exclusions(g, raw);
    partition_out(raw, &excluded)
}

/// Iterates exclusion until no pair is reducible against the retained set.
/// Not the default: reported counts correspond to a single round.
pub fn split_reduced_fixpoint(
    g: &OntoGraph,
    raw: &[SplitPair],
) -> (Vec<SplitPair>, Vec<SplitPair>) {
    let mut retained = raw.to_vec();
    let mut excluded_all = Vec::new();
    loop {
        let excluded = split_exclusions(g, &retained);
        if excluded.is_empty() {
            excluded_all.sort_unstable();
            return (retained, excluded_all);
        }
        let (kept, _) = partition_out(&retained, &excluded);
        retained = kept;
        excluded_all.extend(excluded);
    }
}

fn partition_out(raw: &[SplitPair], excluded: &[SplitPair]) -> (Vec<SplitPair>, Vec<SplitPair>) {
    let mut retained = Vec::with_capacity(raw.len() - excluded.len());
    let mut out = Vec::with_capacity(excluded.len());
    let mut it = excluded.iter().peekable();
    for &p in raw {
        if it.peek() == Some(&&p) {
            it.next();
            out.push(p);
        } else {
            retained.push(p);
        }
    }
    (retained, out)
}

/// Distinct split-order classes of a pair set, ascending.
pub fn split_classes(pairs: &[SplitPair]) -> Vec<EntityId> {
    let mut out: Vec<EntityId> = pairs.iter().map(|p| p.s).collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistogramRow {
    pub class: EntityId,
    /// Distinct witness items splitting this class.
    pub count: usize,
    /// Running pair total in ascending-count order.
    pub cumulative: usize,
    /// Up to nine witness ids, ascending.
    pub samples: Vec<EntityId>,
}

/// Witness counts per split-order class, ascending by count with a running
/// total, each row carrying at most nine sample witnesses.
pub fn split_histogram(pairs: &[SplitPair]) -> Vec<HistogramRow> {
    let mut by_class: FxHashMap<EntityId, Vec<EntityId>> = FxHashMap::default();
    for p in pairs {
        by_class.entry(p.s).or_default().push(p.c);
    }
    let mut rows: Vec<HistogramRow> = by_class
        .into_iter()
        .map(|(class, mut witnesses)| {
            witnesses.sort_unstable();
            witnesses.dedup();
            let count = witnesses.len();
            witnesses.truncate(9);
            HistogramRow {
                class,
                count,
                cumulative: 0,
                samples: witnesses,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.count.cmp(&b.count).then(a.class.cmp(&b.class)));
    let mut running = 0;
    for row in &mut rows {
        running += row.count;
        row.cumulative = running;
    }
    rows
}

pub mod spill {
    //! External-memory pair enumeration: sorted on-disk runs plus a k-way
    //! merge, so dump-scale pair sets never fully materialize in memory.

    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    use std::fs::File;
    use std::io::{self, BufReader, BufWriter, Read, Write};
    use std::path::{Path, PathBuf};

    use super::{component_pairs, SplitCase, SplitPair};
    use crate::graph::OntoGraph;
    use crate::ids::EntityId;

    const RECORD_LEN: usize = 17;

    fn encode(p: &SplitPair) -> [u8; RECORD_LEN] {
        let mut rec = [0u8; RECORD_LEN];
        rec[..8].copy_from_slice(&p.c.value().to_le_bytes());
        rec[8..16].copy_from_slice(&p.s.value().to_le_bytes());
        rec[16] = match p.case {
            SplitCase::SelfPair => 0,
            SplitCase::Ab => 1,
            SplitCase::C => 2,
            SplitCase::D => 3,
        };
        rec
    }

    fn decode(rec: &[u8; RECORD_LEN]) -> SplitPair {
        let c = u64::from_le_bytes(rec[..8].try_into().unwrap());
        let s = u64::from_le_bytes(rec[8..16].try_into().unwrap());
        let case = match rec[16] {
            0 => SplitCase::SelfPair,
            1 => SplitCase::Ab,
            2 => SplitCase::C,
            _ => SplitCase::D,
        };
        SplitPair {
            c: EntityId::new(c),
            s: EntityId::new(s),
            case,
        }
    }

    /// Accumulates pairs into bounded in-memory buffers, flushing each as a
    /// sorted binary run file.
    pub struct PairRunWriter {
        dir: PathBuf,
        run_capacity: usize,
        buf: Vec<SplitPair>,
        runs: Vec<PathBuf>,
        total: u64,
    }

    impl PairRunWriter {
        pub fn new(dir: &Path, run_capacity: usize) -> io::Result<PairRunWriter> {
            std::fs::create_dir_all(dir)?;
            Ok(PairRunWriter {
                dir: dir.to_path_buf(),
                run_capacity: run_capacity.max(1),
                buf: Vec::new(),
                runs: Vec::new(),
                total: 0,
            })
        }

        pub fn push(&mut self, pair: SplitPair) -> io::Result<()> {
            self.buf.push(pair);
            self.total += 1;
            if self.buf.len() >= self.run_capacity {
                self.flush_run()?;
            }
            Ok(())
        }

        fn flush_run(&mut self) -> io::Result<()> {
            if self.buf.is_empty() {
                return Ok(());
            }
            self.buf.sort_unstable();
            let path = self.dir.join(format!("run-{:06}.pairs", self.runs.len()));
            let mut w = BufWriter::new(File::create(&path)?);
            for p in &self.buf {
                w.write_all(&encode(p))?;
            }
            w.flush()?;
            self.runs.push(path);
            self.buf.clear();
            Ok(())
        }

        pub fn finish(mut self) -> io::Result<SpilledPairs> {
            self.flush_run()?;
            Ok(SpilledPairs {
                runs: self.runs,
                total: self.total,
            })
        }
    }

    /// Sorted runs on disk; iterate to merge them in (c, s) order.
    pub struct SpilledPairs {
        runs: Vec<PathBuf>,
        total: u64,
    }

    impl SpilledPairs {
        pub fn total_pairs(&self) -> u64 {
            self.total
        }

        pub fn run_count(&self) -> usize {
            self.runs.len()
        }

        pub fn iter(&self) -> io::Result<MergeIter> {
            let mut heap = BinaryHeap::new();
            let mut readers = Vec::with_capacity(self.runs.len());
            for (i, path) in self.runs.iter().enumerate() {
                let mut reader = BufReader::new(File::open(path)?);
                if let Some(first) = read_record(&mut reader)? {
                    heap.push(Reverse((first, i)));
                }
                readers.push(reader);
            }
            Ok(MergeIter { readers, heap })
        }
    }

    fn read_record(r: &mut impl Read) -> io::Result<Option<SplitPair>> {
        let mut rec = [0u8; RECORD_LEN];
        match r.read_exact(&mut rec) {
            Ok(()) => Ok(Some(decode(&rec))),
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub struct MergeIter {
        readers: Vec<BufReader<File>>,
        heap: BinaryHeap<Reverse<(SplitPair, usize)>>,
    }

    impl Iterator for MergeIter {
        type Item = io::Result<SplitPair>;

        fn next(&mut self) -> Option<io::Result<SplitPair>> {
            let Reverse((pair, run)) = self.heap.pop()?;
            match read_record(&mut self.readers[run]) {
                Ok(Some(next)) => self.heap.push(Reverse((next, run))),
                Ok(None) => {}
                Err(e) => return Some(Err(e)),
            }
            Some(Ok(pair))
        }
    }

    /// Raw-pair enumeration that streams per-component results into sorted
    /// runs of at most `run_capacity` pairs.
    pub fn split_pairs_raw_spilled(
        g: &OntoGraph,
        dir: &Path,
        run_capacity: usize,
    ) -> io::Result<SpilledPairs> {
        let scc = g.scc_condense();
        let mut writer = PairRunWriter::new(dir, run_capacity)?;
        for comp in 0..scc.component_count() as u32 {
            for pair in component_pairs(g, scc.member_ixs(comp)) {
                writer.push(pair)?;
            }
        }
        writer.finish()
    }
}
