//! Result-set algebra between runs and deterministic report output.
//!
//! Result sets are sorted, duplicate-free id lists that diff by three-way
//! set partition (the sorted-file workflow, with numeric rather than string
//! order, so Q5 < Q42 < Q100). Reports are a JSON envelope embedding one CSV
//! per table plus run metadata; identical inputs and config produce
//! byte-identical reports. Timings are optional precisely because they would
//! break that guarantee.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ids::EntityId;
use crate::util::fnv1a64;

/// A named, sorted, duplicate-free id list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultSet {
    pub name: String,
    ids: Vec<EntityId>,
}

impl ResultSet {
    pub fn new(name: impl Into<String>, mut ids: Vec<EntityId>) -> ResultSet {
        ids.sort_unstable();
        ids.dedup();
        ResultSet {
            name: name.into(),
            ids,
        }
    }

    /// Reads ids from text: one per line, first comma/tab field taken,
    /// lines that do not carry a `Q` id (headers, comments) dropped.
    pub fn from_lines(name: impl Into<String>, text: &str) -> ResultSet {
        let ids = text
            .lines()
            .filter_map(|line| {
                let first = line.split([',', '\t']).next()?.trim();
                first.parse().ok()
            })
            .collect();
        ResultSet::new(name, ids)
    }

    pub fn ids(&self) -> &[EntityId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Three disjoint sorted sets partitioning a ∪ b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffResult {
    pub only_a: Vec<EntityId>,
    pub only_b: Vec<EntityId>,
    pub both: Vec<EntityId>,
}

pub fn diff_sets(a: &ResultSet, b: &ResultSet) -> DiffResult {
    let mut out = DiffResult {
        only_a: Vec::new(),
        only_b: Vec::new(),
        both: Vec::new(),
    };
    let (mut i, mut j) = (0, 0);
    while i < a.ids.len() && j < b.ids.len() {
        match a.ids[i].cmp(&b.ids[j]) {
            std::cmp::Ordering::Less => {
                out.only_a.push(a.ids[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.only_b.push(b.ids[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.both.push(a.ids[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.only_a.extend_from_slice(&a.ids[i..]);
    out.only_b.extend_from_slice(&b.ids[j..]);
    out
}

/// One report section: column names plus stringified rows.
#[derive(Debug, Clone)]
pub struct ReportTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ReportTable {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> ReportTable {
        ReportTable {
            name: name.into(),
            columns: columns.iter().map(|&c| c.to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&csv_line(&self.columns));
        for row in &self.rows {
            out.push_str(&csv_line(row));
        }
        out
    }
}

fn csv_line<S: AsRef<str>>(fields: &[S]) -> String {
    let mut line = String::new();
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&csv_field(f.as_ref()));
    }
    line.push('\n');
    line
}

fn csv_field(f: &str) -> String {
    if f.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", f.replace('"', "\"\""))
    } else {
        f.to_owned()
    }
}

/// Run metadata recorded verbatim in every envelope.
#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub input_digest: String,
    pub config: serde_json::Value,
    /// Omitted by default: timing values vary run to run and would break
    /// byte determinism.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u64>>,
}

impl ReportMeta {
    pub fn for_input(input_bytes: &[u8], config: serde_json::Value) -> ReportMeta {
        ReportMeta {
            input_digest: format!("fnv1a64:{:016x}", fnv1a64(input_bytes)),
            config,
            timings_ms: None,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    meta: &'a ReportMeta,
    tables: Vec<TableOut<'a>>,
}

#[derive(Serialize)]
struct TableOut<'a> {
    name: &'a str,
    columns: &'a [String],
    csv: String,
}

/// Serializes the envelope; byte-deterministic for identical tables and
/// metadata.
pub fn write_report(tables: &[ReportTable], meta: &ReportMeta) -> Vec<u8> {
    let envelope = Envelope {
        meta,
        tables: tables
            .iter()
            .map(|t| TableOut {
                name: &t.name,
                columns: &t.columns,
                csv: t.to_csv(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&envelope).expect("report serialization");
    bytes.push(b'\n');
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::q;

    fn set(name: &str, ids: &[u64]) -> ResultSet {
        ResultSet::new(name, ids.iter().map(|&n| q(n)).collect())
    }

    #[test]
    fn result_set_sorts_numerically() {
        let s = set("x", &[100, 5, 42, 5]);
        assert_eq!(s.ids(), &[q(5), q(42), q(100)]);
    }

    #[test]
    fn from_lines_drops_non_ids() {
        let s = ResultSet::from_lines("x", "entity,count\nQ42,7\nQ5\n# note\n");
        assert_eq!(s.ids(), &[q(5), q(42)]);
    }

    #[test]
    fn diff_identical_and_disjoint() {
        let a = set("a", &[1, 2, 3]);
        assert_eq!(
            diff_sets(&a, &a),
            DiffResult {
                only_a: vec![],
                only_b: vec![],
                both: vec![q(1), q(2), q(3)],
            }
        );
        let b = set("b", &[4, 5]);
        let d = diff_sets(&a, &b);
        assert!(d.both.is_empty());
        assert_eq!(d.only_a.len() + d.both.len(), a.len());
    }

    #[test]
    fn diff_partitions() {
        let a = set("a", &[1, 3, 5, 7]);
        let b = set("b", &[3, 4, 7, 9]);
        let d = diff_sets(&a, &b);
        assert_eq!(d.only_a, vec![q(1), q(5)]);
        assert_eq!(d.only_b, vec![q(4), q(9)]);
        assert_eq!(d.both, vec![q(3), q(7)]);
        assert_eq!(d.only_a.len() + d.both.len(), a.len());
    }

    #[test]
    fn report_bytes_are_deterministic() {
        let mut table = ReportTable::new("census", &["definition", "count"]);
        table.push_row(vec!["instance".into(), "7".into()]);
        let meta = ReportMeta::for_input(b"input", serde_json::json!({"def": "instance"}));
        let a = write_report(&[table.clone()], &meta);
        let b = write_report(&[table], &meta);
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().contains("fnv1a64:"));
    }

    #[test]
    fn empty_report_has_no_tables() {
        let meta = ReportMeta::for_input(b"", serde_json::Value::Null);
        let text = String::from_utf8(write_report(&[], &meta)).unwrap();
        assert!(text.contains("\"tables\": []"));
    }

    #[test]
    fn csv_quotes_only_when_needed() {
        let mut t = ReportTable::new("labels", &["id", "label"]);
        t.push_row(vec!["Q1".into(), "plain".into()]);
        t.push_row(vec!["Q2".into(), "with, comma".into()]);
        t.push_row(vec!["Q3".into(), "with \"quotes\"".into()]);
        assert_eq!(
            t.to_csv(),
            "id,label\nQ1,plain\nQ2,\"with, comma\"\nQ3,\"with \"\"quotes\"\"\"\n"
        );
    }
}
