//! Identifiers for ontology items and properties.
//!
//! Items are externally rendered as `Q<n>` and properties as `P<n>`. Only the
//! two ontology relations (`P31` instance of, `P279` subclass of) become graph
//! edges; other properties appear only in fix batches and metaclass checks.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdError {
    #[error("malformed entity id `{0}` (expected Q followed by a positive decimal)")]
    BadEntity(String),
    #[error("malformed property id `{0}` (expected P followed by a positive decimal)")]
    BadProperty(String),
}

/// Numeric part of a `Q` item identifier.
///
/// The value is always positive; rendering is `Q` + decimal without leading
/// zeros, so `render(parse(s)) == s` for every well-formed id string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(u64);

impl EntityId {
    /// Panics if `value` is zero; parsed ids are validated upstream.
    pub const fn new(value: u64) -> Self {
        assert!(value > 0, "entity ids are positive");
        EntityId(value)
    }

    pub const fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}", self.0)
    }
}

fn parse_positive_decimal(digits: &str) -> Option<u64> {
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

impl FromStr for EntityId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, IdError> {
        s.strip_prefix('Q')
            .and_then(parse_positive_decimal)
            .map(EntityId)
            .ok_or_else(|| IdError::BadEntity(s.to_owned()))
    }
}

/// Numeric part of a `P` property identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropertyId(u32);

impl PropertyId {
    pub const INSTANCE_OF: PropertyId = PropertyId(31);
    pub const SUBCLASS_OF: PropertyId = PropertyId(279);
    pub const METASUBCLASS_OF: PropertyId = PropertyId(2445);
    pub const IS_METACLASS_FOR: PropertyId = PropertyId(8225);

    pub fn new(value: u32) -> Self {
        assert!(value > 0, "property ids are positive");
        PropertyId(value)
    }

    pub fn value(self) -> u32 {
        self.0
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

impl FromStr for PropertyId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, IdError> {
        s.strip_prefix('P')
            .and_then(parse_positive_decimal)
            .and_then(|v| u32::try_from(v).ok())
            .map(PropertyId)
            .ok_or_else(|| IdError::BadProperty(s.to_owned()))
    }
}

/// The two ontology relations. `InstanceOf` sorts before `SubclassOf`,
/// matching the numeric order of `P31` and `P279`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    InstanceOf,
    SubclassOf,
}

impl EdgeKind {
    pub fn property(self) -> PropertyId {
        match self {
            EdgeKind::InstanceOf => PropertyId::INSTANCE_OF,
            EdgeKind::SubclassOf => PropertyId::SUBCLASS_OF,
        }
    }

    /// Maps `P31`/`P279` to an edge kind; every other property is `None`.
    pub fn from_property(p: PropertyId) -> Option<EdgeKind> {
        match p {
            PropertyId::INSTANCE_OF => Some(EdgeKind::InstanceOf),
            PropertyId::SUBCLASS_OF => Some(EdgeKind::SubclassOf),
            _ => None,
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.property().fmt(f)
    }
}

/// One `subject --kind--> object` statement. Derived ordering is
/// (subject, kind, object), the canonical handoff order of the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawEdge {
    pub subject: EntityId,
    pub kind: EdgeKind,
    pub object: EntityId,
}

impl RawEdge {
    pub fn new(subject: EntityId, kind: EdgeKind, object: EntityId) -> Self {
        RawEdge {
            subject,
            kind,
            object,
        }
    }
}

impl fmt::Display for RawEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.kind, self.object)
    }
}

/// Shorthand used by fixtures and tests: `q(5)` is `Q5`.
pub fn q(value: u64) -> EntityId {
    EntityId::new(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entity_round_trip() {
        for s in ["Q1", "Q42", "Q16889133", "Q123456789012"] {
            let id: EntityId = s.parse().unwrap();
            assert_eq!(id.to_string(), s);
        }
    }

    #[test]
    fn entity_rejects_malformed() {
        for s in ["Q0", "Q", "Q01", "Q-3", "42", "Q4 2", "P31", "Q99999999999999999999"] {
            assert!(s.parse::<EntityId>().is_err(), "{s} should not parse");
        }
    }

    #[test]
    fn property_mapping_is_exact() {
        assert_eq!(
            EdgeKind::from_property("P31".parse().unwrap()),
            Some(EdgeKind::InstanceOf)
        );
        assert_eq!(
            EdgeKind::from_property("P279".parse().unwrap()),
            Some(EdgeKind::SubclassOf)
        );
        assert_eq!(EdgeKind::from_property(PropertyId::new(2445)), None);
    }

    #[test]
    fn edge_ordering_is_subject_kind_object() {
        let a = RawEdge::new(q(2), EdgeKind::SubclassOf, q(1));
        let b = RawEdge::new(q(2), EdgeKind::InstanceOf, q(9));
        let c = RawEdge::new(q(3), EdgeKind::InstanceOf, q(1));
        assert!(b < a && a < c);
    }
}
