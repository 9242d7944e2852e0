use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::schema::{OntologySchema, ValueType};
use crate::patterns::{AttributeValue, Value};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const DEFAULT_BASE: &str = "http://example.org/obie#";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Datatype {
    String,
    Integer,
    Decimal,
    Boolean,
}

impl Datatype {
    pub fn local_name(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Integer => "integer",
            Datatype::Decimal => "decimal",
            Datatype::Boolean => "boolean",
        }
    }

    pub fn iri(self) -> String {
        format!("{XSD_NS}{}", self.local_name())
    }

    pub fn from_iri(iri: &str) -> Option<Self> {
        match iri.strip_prefix(XSD_NS)? {
            "string" => Some(Datatype::String),
            "integer" => Some(Datatype::Integer),
            "decimal" => Some(Datatype::Decimal),
            "boolean" => Some(Datatype::Boolean),
            _ => None,
        }
    }
}

impl From<ValueType> for Datatype {
    fn from(t: ValueType) -> Self {
        match t {
            ValueType::String => Datatype::String,
            ValueType::Integer => Datatype::Integer,
            ValueType::Decimal => Datatype::Decimal,
            ValueType::Boolean => Datatype::Boolean,
        }
    }
}

/// An IRI or a typed literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RdfTerm {
    Iri(String),
    Literal { lexical: String, datatype: Datatype },
}

impl RdfTerm {
    pub fn iri(s: impl Into<String>) -> Self {
        RdfTerm::Iri(s.into())
    }

    pub fn literal(lexical: impl Into<String>, datatype: Datatype) -> Self {
        RdfTerm::Literal {
            lexical: lexical.into(),
            datatype,
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            RdfTerm::Iri(s) => Some(s),
            RdfTerm::Literal { .. } => None,
        }
    }
}

impl fmt::Display for RdfTerm {
    /// N-Triples style rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdfTerm::Iri(i) => write!(f, "<{i}>"),
            RdfTerm::Literal { lexical, datatype } => {
                write!(f, "\"{}\"^^<{}>", escape_string(lexical), datatype.iri())
            }
        }
    }
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RdfTriple {
    pub subject: String,
    pub predicate: String,
    pub object: RdfTerm,
}

impl RdfTriple {
    pub fn new(subject: impl Into<String>, predicate: impl Into<String>, object: RdfTerm) -> Self {
        RdfTriple {
            subject: subject.into(),
            predicate: predicate.into(),
            object,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StoreError {
    #[error("instance name is empty")]
    EmptyName,
    #[error("class `{0}` is not declared in the schema")]
    UndeclaredClass(String),
    #[error("attribute `{attribute}` is not declared for class `{class}`")]
    UndeclaredAttribute { attribute: String, class: String },
    #[error("attribute `{attribute}` expects {expected}, got `{found}`")]
    TypeMismatch {
        attribute: String,
        expected: ValueType,
        found: String,
    },
    #[error("instance `{instance}` is already typed `{existing}`")]
    ClassConflict { instance: String, existing: String },
}

/// A functional attribute that already held a different value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejected {
    pub attribute: String,
    pub existing: RdfTerm,
    pub attempted: RdfTerm,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssertOutcome {
    pub instance: String,
    pub added: Vec<RdfTriple>,
    pub rejected: Vec<Rejected>,
}

/// Local-name escaping for minted IRIs: spaces become `_`, anything outside
/// `[A-Za-z0-9_-]` is percent-encoded as UTF-8, and existing `%XX` escapes are
/// kept so minting an already-minted name is a no-op.
pub fn mint_instance_iri(base: &str, name: &str) -> Result<String, StoreError> {
    let name = name.trim();
    if name.is_empty() {
        return Err(StoreError::EmptyName);
    }
    let bytes = name.as_bytes();
    let mut local = String::with_capacity(name.len());
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let escaped = b == b'%'
            && i + 2 < bytes.len()
            && bytes[i + 1].is_ascii_hexdigit()
            && bytes[i + 2].is_ascii_hexdigit();
        if escaped {
            local.push_str(&name[i..i + 3]);
            i += 3;
            continue;
        }
        match b {
            b' ' => local.push('_'),
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'_' | b'-' => local.push(b as char),
            _ => local.push_str(&format!("%{b:02X}")),
        }
        i += 1;
    }
    Ok(format!("{base}{local}"))
}

/// Schema plus asserted instance triples.
#[derive(Debug, Clone)]
pub struct OntologyGraph {
    pub schema: OntologySchema,
    pub base_iri: String,
    triples: BTreeSet<RdfTriple>,
}

impl OntologyGraph {
    pub fn new(schema: OntologySchema, base_iri: impl Into<String>) -> Self {
        OntologyGraph {
            schema,
            base_iri: base_iri.into(),
            triples: BTreeSet::new(),
        }
    }

    pub fn triples(&self) -> impl ExactSizeIterator<Item = &RdfTriple> {
        self.triples.iter()
    }

    pub fn triple_set(&self) -> &BTreeSet<RdfTriple> {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, t: &RdfTriple) -> bool {
        self.triples.contains(t)
    }

    pub fn class_iri(&self, class: &str) -> String {
        format!("{}{}", self.base_iri, class)
    }

    pub fn attribute_iri(&self, attribute: &str) -> String {
        format!("{}{}", self.base_iri, attribute)
    }

    /// Instances with their class IRI.
    pub fn instances(&self) -> BTreeMap<&str, &str> {
        self.triples
            .iter()
            .filter(|t| t.predicate == RDF_TYPE)
            .filter_map(|t| Some((t.subject.as_str(), t.object.as_iri()?)))
            .collect()
    }

    fn value_of(&self, subject: &str, predicate: &str) -> Option<&RdfTerm> {
        // the empty IRI sorts before every other term
        let lowest = RdfTriple::new(subject, predicate, RdfTerm::Iri(String::new()));
        self.triples
            .range(lowest..)
            .next()
            .filter(|t| t.subject == subject && t.predicate == predicate)
            .map(|t| &t.object)
    }

    /// Add one instance of `class` with the given attribute values. The
    /// whole call is validated before anything is inserted. Attributes are
    /// single-valued: a second, different value is reported in
    /// `rejected` and not stored.
    pub fn assert_instance(
        &mut self,
        class: &str,
        name: &str,
        attrs: &[AttributeValue],
    ) -> Result<AssertOutcome, StoreError> {
        if !self.schema.has_class(class) {
            return Err(StoreError::UndeclaredClass(class.to_string()));
        }
        let subject = mint_instance_iri(&self.base_iri, name)?;
        let class_iri = self.class_iri(class);
        if let Some(existing) = self.value_of(&subject, RDF_TYPE) {
            if existing.as_iri() != Some(class_iri.as_str()) {
                return Err(StoreError::ClassConflict {
                    instance: subject,
                    existing: existing.as_iri().unwrap_or_default().to_string(),
                });
            }
        }
        let mut pending = Vec::with_capacity(attrs.len());
        for a in attrs {
            let def = self
                .schema
                .attribute(&a.attribute)
                .filter(|d| d.owner == class)
                .ok_or_else(|| StoreError::UndeclaredAttribute {
                    attribute: a.attribute.clone(),
                    class: class.to_string(),
                })?;
            let object = to_literal(&a.attribute, def.value_type, &a.value)?;
            pending.push((self.attribute_iri(&a.attribute), a.attribute.clone(), object));
        }

        let mut out = AssertOutcome {
            instance: subject.clone(),
            ..Default::default()
        };
        let typed = RdfTriple::new(&subject, RDF_TYPE, RdfTerm::Iri(class_iri));
        if self.triples.insert(typed.clone()) {
            out.added.push(typed);
        }
        for (predicate, attribute, object) in pending {
            match self.value_of(&subject, &predicate) {
                Some(existing) if *existing == object => {}
                Some(existing) => out.rejected.push(Rejected {
                    attribute,
                    existing: existing.clone(),
                    attempted: object,
                }),
                None => {
                    let t = RdfTriple::new(&subject, predicate, object);
                    self.triples.insert(t.clone());
                    out.added.push(t);
                }
            }
        }
        Ok(out)
    }

    /// Insert a raw triple, bypassing schema checks. Used when reloading
    /// serialized graphs.
    pub fn insert_unchecked(&mut self, t: RdfTriple) -> bool {
        self.triples.insert(t)
    }

    /// Every non-type predicate is a declared attribute and every instance
    /// carries exactly one type.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut types: BTreeMap<&str, usize> = BTreeMap::new();
        for t in &self.triples {
            if t.predicate == RDF_TYPE {
                *types.entry(&t.subject).or_default() += 1;
                continue;
            }
            let local = t
                .predicate
                .strip_prefix(&self.base_iri)
                .ok_or_else(|| format!("predicate {} outside base", t.predicate))?;
            if self.schema.attribute(local).is_none() {
                return Err(format!("undeclared predicate {}", t.predicate));
            }
        }
        for t in &self.triples {
            if types.get(t.subject.as_str()).copied().unwrap_or(0) != 1 {
                return Err(format!("{} does not have exactly one type", t.subject));
            }
        }
        Ok(())
    }
}

/// Canonical decimal: shortest round-trip form with at least one fraction digit.
pub(crate) fn canonical_decimal(x: f64) -> String {
    let s = format!("{x}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn to_literal(attribute: &str, ty: ValueType, value: &Value) -> Result<RdfTerm, StoreError> {
    let mismatch = || StoreError::TypeMismatch {
        attribute: attribute.to_string(),
        expected: ty,
        found: value.to_string(),
    };
    let number = match value {
        Value::Number(n) => Some(*n),
        Value::Text(t) => t.trim().parse::<f64>().ok().filter(|n| n.is_finite()),
    };
    let lexical = match ty {
        ValueType::String => match value {
            Value::Text(t) => t.trim().to_string(),
            Value::Number(n) => format!("{n}"),
        },
        ValueType::Integer => {
            let n = number.filter(|n| n.fract() == 0.0 && n.abs() < 9.0e15).ok_or_else(mismatch)?;
            format!("{}", n as i64)
        }
        ValueType::Decimal => canonical_decimal(number.ok_or_else(mismatch)?),
        ValueType::Boolean => match value {
            Value::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "true" | "yes" => "true".to_string(),
                "false" | "no" => "false".to_string(),
                _ => return Err(mismatch()),
            },
            Value::Number(_) => return Err(mismatch()),
        },
    };
    Ok(RdfTerm::literal(lexical, ty.into()))
}
