//! Streaming edge-dump ingestion.
//!
//! Two input formats are supported:
//!
//! * **TSV** — one record per line, fields separated by a single TAB:
//!   `Q<s>\tP31|P279\tQ<o>` for edges, `Q<s>\tlabel\t<text>` for labels,
//!   `#`-prefixed comment lines, blank lines ignored.
//! * **N-Triples subset** — lines of the form
//!   `<http://www.wikidata.org/entity/Q{n}> <http://www.wikidata.org/prop/direct/P31|P279> <http://www.wikidata.org/entity/Q{m}> .`
//!   plus `rdfs:label` triples with a language-tagged literal, of which only
//!   `@en` is retained. All other well-formed triples (statement nodes,
//!   qualifiers, sitelinks, other properties, non-`@en` labels) are ignored.
//!
//! Skip accounting: a line counts as *skipped* when it is malformed, when a
//! TSV line is not an edge, label, or comment, or when a `P31`/`P279` triple
//! has a non-entity object (literal or blank node, e.g. a `somevalue`
//! statement) — those lines can never yield an edge and are surfaced through
//! [`ParseStats::lines_skipped`]. Well-formed but out-of-scope N-Triples are
//! not counted as skipped.
//!
//! Parsing is single-pass. Duplicate edges are deduplicated and the edge list
//! is sorted by (subject, kind, object) before handoff, so the result is
//! independent of input line order.

use std::io::{self, BufRead};
use std::str::FromStr;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::ids::{EdgeKind, EntityId, RawEdge};
use crate::par;

const WD_ENTITY: &str = "http://www.wikidata.org/entity/";
const WDT_DIRECT: &str = "http://www.wikidata.org/prop/direct/";
const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read input: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Tsv,
    NTriples,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub lines_read: u64,
    pub lines_skipped: u64,
}

#[derive(Debug, Default)]
pub struct ParsedInput {
    /// Sorted by (subject, kind, object), duplicate-free.
    pub edges: Vec<RawEdge>,
    pub labels: FxHashMap<EntityId, String>,
    pub stats: ParseStats,
}

/// Parses an edge dump, returning all and only `P31`/`P279` edges plus the
/// retained labels. Malformed or out-of-scope lines are never fatal.
pub fn parse_edge_file(
    reader: impl BufRead,
    format: InputFormat,
) -> Result<ParsedInput, IngestError> {
    let mut edges = FxHashSet::default();
    let mut labels = FxHashMap::default();
    let mut stats = ParseStats::default();

    for line in reader.lines() {
        let line = line?;
        stats.lines_read += 1;
        let parsed = match format {
            InputFormat::Tsv => parse_tsv_line(&line),
            InputFormat::NTriples => parse_nt_line(&line),
        };
        match parsed {
            Line::Edge(e) => {
                edges.insert(e);
            }
            Line::Label(id, text) => {
                labels.insert(id, text);
            }
            Line::Ignored => {}
            Line::Skipped => stats.lines_skipped += 1,
        }
    }

    let mut edges: Vec<RawEdge> = edges.into_iter().collect();
    par::sort(&mut edges);
    Ok(ParsedInput {
        edges,
        labels,
        stats,
    })
}

/// Writes edges and labels back out in the TSV format; `parse_edge_file` of
/// the result reproduces the same edge list and label table.
pub fn render_tsv(edges: &[RawEdge], labels: &FxHashMap<EntityId, String>) -> String {
    let mut out = String::new();
    for e in edges {
        out.push_str(&format!("{}\t{}\t{}\n", e.subject, e.kind, e.object));
    }
    let mut ids: Vec<&EntityId> = labels.keys().collect();
    ids.sort_unstable();
    for id in ids {
        out.push_str(&format!("{}\tlabel\t{}\n", id, labels[id]));
    }
    out
}

enum Line {
    Edge(RawEdge),
    Label(EntityId, String),
    Ignored,
    Skipped,
}

fn parse_tsv_line(line: &str) -> Line {
    if line.trim().is_empty() || line.starts_with('#') {
        return Line::Ignored;
    }
    let mut fields = line.splitn(3, '\t');
    let (Some(subject), Some(predicate), Some(rest)) =
        (fields.next(), fields.next(), fields.next())
    else {
        return Line::Skipped;
    };
    let Ok(subject) = EntityId::from_str(subject) else {
        return Line::Skipped;
    };
    match predicate {
        "P31" | "P279" => {
            let kind = if predicate == "P31" {
                EdgeKind::InstanceOf
            } else {
                EdgeKind::SubclassOf
            };
            match EntityId::from_str(rest) {
                Ok(object) => Line::Edge(RawEdge::new(subject, kind, object)),
                Err(_) => Line::Skipped,
            }
        }
        "label" => Line::Label(subject, rest.to_owned()),
        _ => Line::Skipped,
    }
}

fn parse_nt_line(line: &str) -> Line {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Line::Ignored;
    }
    let Some(body) = trimmed.strip_suffix('.') else {
        return Line::Skipped;
    };
    let body = body.trim_end();
    let mut split = body.splitn(3, char::is_whitespace);
    let (Some(subject), Some(predicate), Some(object)) = (split.next(), split.next(), split.next())
    else {
        return Line::Skipped;
    };
    let object = object.trim();
    if object.is_empty() {
        return Line::Skipped;
    }

    let Some(predicate) = iri_of(predicate) else {
        return Line::Skipped;
    };

    // Triples about statement nodes, references, etc. are out of scope.
    let Some(subject) = entity_of(subject) else {
        return Line::Ignored;
    };

    if let Some(prop) = predicate.strip_prefix(WDT_DIRECT) {
        let kind = match prop {
            "P31" => EdgeKind::InstanceOf,
            "P279" => EdgeKind::SubclassOf,
            _ => return Line::Ignored,
        };
        // An edge-position object that is not an entity (blank node,
        // somevalue, literal) yields no edge and is surfaced as skipped.
        return match entity_of(object) {
            Some(object) => Line::Edge(RawEdge::new(subject, kind, object)),
            None => Line::Skipped,
        };
    }
    if predicate == RDFS_LABEL {
        return match literal_of(object) {
            Some((text, Some("en"))) => Line::Label(subject, text),
            Some(_) => Line::Ignored,
            None => Line::Skipped,
        };
    }
    Line::Ignored
}

fn iri_of(token: &str) -> Option<&str> {
    token.strip_prefix('<')?.strip_suffix('>')
}

fn entity_of(token: &str) -> Option<EntityId> {
    iri_of(token)?
        .strip_prefix(WD_ENTITY)
        .and_then(|id| EntityId::from_str(id).ok())
}

/// Splits a literal token into its unescaped text and optional language tag.
fn literal_of(token: &str) -> Option<(String, Option<&str>)> {
    let rest = token.strip_prefix('"')?;
    let mut text = String::new();
    let mut chars = rest.char_indices();
    let tail = loop {
        let (i, c) = chars.next()?;
        match c {
            '"' => break &rest[i + 1..],
            '\\' => {
                let (_, esc) = chars.next()?;
                match esc {
                    't' => text.push('\t'),
                    'n' => text.push('\n'),
                    'r' => text.push('\r'),
                    '"' => text.push('"'),
                    '\\' => text.push('\\'),
                    'u' | 'U' => {
                        let len = if esc == 'u' { 4 } else { 8 };
                        let mut code = 0u32;
                        for _ in 0..len {
                            let (_, h) = chars.next()?;
                            code = code.checked_mul(16)? + h.to_digit(16)?;
                        }
                        text.push(char::from_u32(code)?);
                    }
                    _ => return None,
                }
            }
            c => text.push(c),
        }
    };
    if tail.is_empty() {
        Some((text, None))
    } else if let Some(lang) = tail.strip_prefix('@') {
        Some((text, Some(lang)))
    } else if tail.starts_with("^^") {
        Some((text, None))
    } else {
        None
    }
}
