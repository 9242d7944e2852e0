//! Rule-driven attribute extraction.
//!
//! Rule file grammar, one rule per line, `#` starts a comment:
//!
//! ```text
//! option gap 2
//! option text-gap 3
//! simple  doctoroncall   "doctor-on-call" => "true"
//! medium  numrooms       "[n] rooms"
//! complex distfromairport "[n] kms from airport" | "distance from [text] airport is [n]" as dist1
//! ```
//!
//! `[n]` matches one number-like token, `[text]` absorbs up to `text-gap`
//! tokens. Medium rules look for the number up to `gap` tokens away on
//! either side of their term.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::store::OntologySchema;
use crate::textprep::tagger::is_number_like;
use crate::textprep::{tokenize, Token};

pub const DEFAULT_GAP: usize = 2;
pub const DEFAULT_TEXT_GAP: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Simple,
    Medium,
    Complex,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::Simple => "simple",
            RuleKind::Medium => "medium",
            RuleKind::Complex => "complex",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Literal(String),
    Number,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub source: String,
    pub elements: Vec<Element>,
}

impl Template {
    fn parse(source: &str) -> Template {
        let elements = tokenize(source)
            .into_iter()
            .map(|t| match t.surface.to_lowercase().as_str() {
                "[n]" => Element::Number,
                "[text]" => Element::Text,
                w => Element::Literal(w.to_string()),
            })
            .collect();
        Template {
            source: source.to_string(),
            elements,
        }
    }

    fn count(&self, f: impl Fn(&Element) -> bool) -> usize {
        self.elements.iter().filter(|e| f(e)).count()
    }

    fn literals(&self) -> usize {
        self.count(|e| matches!(e, Element::Literal(_)))
    }

    fn placeholders(&self) -> usize {
        self.count(|e| !matches!(e, Element::Literal(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternRule {
    pub id: String,
    pub attribute: String,
    pub kind: RuleKind,
    pub templates: Vec<Template>,
    pub fixed_value: Option<String>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => write!(f, "{n}"),
            Value::Text(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeValue {
    pub attribute: String,
    /// Matched source span.
    pub raw: String,
    pub value: Value,
    pub unit: Option<String>,
    pub rule_id: String,
}

/// A later match for an attribute that disagreed with the kept value.
#[derive(Debug, Clone, PartialEq)]
pub struct Conflict {
    pub attribute: String,
    pub kept: Value,
    pub dropped: Value,
    pub rule_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("line {line}: unknown rule kind `{kind}`")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: simple rule needs `=> \"value\"`")]
    MissingFixedValue { line: usize },
    #[error("line {line}: rule has no templates")]
    NoTemplates { line: usize },
    #[error("line {line}: duplicate rule id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("line {line}: attribute `{attribute}` is not in the schema")]
    UnknownAttribute { line: usize, attribute: String },
}

/// Parsed rule file with its gap settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub rules: Vec<PatternRule>,
    pub gap: usize,
    pub text_gap: usize,
}

const BUNDLED: &str = include_str!("../data/hotel.rules");

impl RuleSet {
    pub fn hotel() -> Self {
        parse_rules(BUNDLED).expect("bundled hotel rules are valid")
    }

    /// Every rule targets an attribute declared in `schema`.
    pub fn check_schema(&self, schema: &OntologySchema) -> Result<(), RuleError> {
        match self.rules.iter().find(|r| schema.attribute(&r.attribute).is_none()) {
            Some(r) => Err(RuleError::UnknownAttribute {
                line: r.line,
                attribute: r.attribute.clone(),
            }),
            None => Ok(()),
        }
    }

    pub fn with_gaps(mut self, gap: Option<usize>, text_gap: Option<usize>) -> Self {
        self.gap = gap.unwrap_or(self.gap);
        self.text_gap = text_gap.unwrap_or(self.text_gap);
        self
    }

    /// Match every rule against a document given as tokenized sentences.
    /// Candidates are taken in rule order, then template order, then
    /// sentence order; the first value per attribute is kept.
    pub fn apply_document(&self, sentences: &[Vec<Token>]) -> Extraction {
        let mut kept: BTreeMap<String, AttributeValue> = BTreeMap::new();
        let mut conflicts = Vec::new();
        for rule in &self.rules {
            for template in &rule.templates {
                let hit = sentences
                    .iter()
                    .find_map(|s| self.match_template(rule, template, s));
                let Some(av) = hit else { continue };
                match kept.get(&av.attribute) {
                    None => {
                        kept.insert(av.attribute.clone(), av);
                    }
                    Some(prev) if same_value(&prev.value, &av.value) => {}
                    Some(prev) => conflicts.push(Conflict {
                        attribute: av.attribute.clone(),
                        kept: prev.value.clone(),
                        dropped: av.value,
                        rule_id: av.rule_id,
                    }),
                }
            }
        }
        Extraction {
            values: kept.into_values().collect(),
            conflicts,
        }
    }

    fn match_template(
        &self,
        rule: &PatternRule,
        template: &Template,
        tokens: &[Token],
    ) -> Option<AttributeValue> {
        let lower: Vec<String> = tokens.iter().map(|t| t.surface.to_lowercase()).collect();
        match rule.kind {
            RuleKind::Simple => {
                let lits: Vec<&str> = template
                    .elements
                    .iter()
                    .filter_map(|e| match e {
                        Element::Literal(l) => Some(l.as_str()),
                        _ => None,
                    })
                    .collect();
                let start = find_subsequence(&lower, &lits)?;
                Some(AttributeValue {
                    attribute: rule.attribute.clone(),
                    raw: span(tokens, start, start + lits.len()),
                    value: Value::Text(rule.fixed_value.clone().unwrap_or_default()),
                    unit: None,
                    rule_id: rule.id.clone(),
                })
            }
            RuleKind::Medium => self.match_medium(rule, template, tokens, &lower),
            RuleKind::Complex => (0..tokens.len()).find_map(|start| {
                let mut caps = Captures::default();
                let end = self.unify(&template.elements, &lower, start, &mut caps)?;
                Some(caps.into_value(rule, tokens, start, end))
            }),
        }
    }

    fn match_medium(
        &self,
        rule: &PatternRule,
        template: &Template,
        tokens: &[Token],
        lower: &[String],
    ) -> Option<AttributeValue> {
        let number_first = matches!(template.elements.first(), Some(Element::Number));
        let term = template.elements.iter().find_map(|e| match e {
            Element::Literal(l) => Some(l.as_str()),
            _ => None,
        })?;
        for (p, word) in lower.iter().enumerate() {
            if word != term {
                continue;
            }
            let before = (1..=self.gap + 1)
                .filter_map(|d| p.checked_sub(d))
                .find(|&i| is_number_like(&tokens[i].surface));
            let after = (1..=self.gap + 1)
                .map(|d| p + d)
                .take_while(|&i| i < tokens.len())
                .find(|&i| is_number_like(&tokens[i].surface));
            let (first, second) = if number_first { (before, after) } else { (after, before) };
            if let Some(n) = first.or(second) {
                let (lo, hi) = if n < p { (n, p) } else { (p, n) };
                let (value, unit) = number_of(&tokens[n].surface)?;
                return Some(AttributeValue {
                    attribute: rule.attribute.clone(),
                    raw: span(tokens, lo, hi + 1),
                    value: Value::Number(value),
                    unit,
                    rule_id: rule.id.clone(),
                });
            }
        }
        None
    }

    /// Backtracking match of `elems` at `pos`; returns the end position.
    fn unify(
        &self,
        elems: &[Element],
        words: &[String],
        pos: usize,
        caps: &mut Captures,
    ) -> Option<usize> {
        let Some((head, rest)) = elems.split_first() else {
            return Some(pos);
        };
        match head {
            Element::Literal(l) => {
                if words.get(pos)? == l {
                    self.unify(rest, words, pos + 1, caps)
                } else {
                    None
                }
            }
            Element::Number => {
                let w = words.get(pos)?;
                let (_, unit) = number_of(w)?;
                let saved = caps.clone();
                caps.number = Some(pos);
                // a fused unit ("17kms") may stand in for a following unit literal
                if let (Some(u), Some(Element::Literal(next))) = (&unit, rest.first()) {
                    if canonical_unit(next) == *u {
                        if let Some(end) = self.unify(&rest[1..], words, pos + 1, caps) {
                            return Some(end);
                        }
                    }
                }
                if unit.is_none() {
                    if let Some(Element::Literal(next)) = rest.first() {
                        caps.unit = is_unit(next).then(|| canonical_unit(next));
                    }
                }
                match self.unify(rest, words, pos + 1, caps) {
                    Some(end) => Some(end),
                    None => {
                        *caps = saved;
                        None
                    }
                }
            }
            Element::Text => {
                for take in 0..=self.text_gap {
                    if pos + take > words.len() {
                        break;
                    }
                    let saved = caps.clone();
                    if caps.text.is_none() {
                        caps.text = Some((pos, pos + take));
                    }
                    if let Some(end) = self.unify(rest, words, pos + take, caps) {
                        return Some(end);
                    }
                    *caps = saved;
                }
                None
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Captures {
    number: Option<usize>,
    unit: Option<String>,
    text: Option<(usize, usize)>,
}

impl Captures {
    fn into_value(self, rule: &PatternRule, tokens: &[Token], start: usize, end: usize) -> AttributeValue {
        let (value, unit) = match (self.number, &rule.fixed_value, self.text) {
            (_, Some(fixed), _) => (Value::Text(fixed.clone()), None),
            (Some(n), None, _) => {
                let (v, u) = number_of(&tokens[n].surface).expect("captured token is numeric");
                (Value::Number(v), u.or(self.unit))
            }
            (None, None, Some((a, b))) => (Value::Text(span(tokens, a, b)), None),
            (None, None, None) => (Value::Text(span(tokens, start, end)), None),
        };
        AttributeValue {
            attribute: rule.attribute.clone(),
            raw: span(tokens, start, end),
            value,
            unit,
            rule_id: rule.id.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    /// Sorted by attribute name.
    pub values: Vec<AttributeValue>,
    pub conflicts: Vec<Conflict>,
}

fn same_value(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => x == y,
        (Value::Text(x), Value::Text(y)) => x.trim().eq_ignore_ascii_case(y.trim()),
        _ => false,
    }
}

fn span(tokens: &[Token], start: usize, end: usize) -> String {
    tokens[start..end]
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn find_subsequence(words: &[String], needle: &[&str]) -> Option<usize> {
    if needle.is_empty() || needle.len() > words.len() {
        return None;
    }
    words
        .windows(needle.len())
        .position(|w| w.iter().zip(needle).all(|(a, b)| a == b))
}

/// Apply `rules` to one token sequence with the default gap settings.
pub fn apply_rules(tokens: &[Token], rules: &[PatternRule]) -> Vec<AttributeValue> {
    RuleSet {
        rules: rules.to_vec(),
        gap: DEFAULT_GAP,
        text_gap: DEFAULT_TEXT_GAP,
    }
    .apply_document(&[tokens.to_vec()])
    .values
}

#[derive(Debug, Clone, PartialEq)]
pub enum Normalized {
    Number { value: f64, unit: Option<String> },
    Text(String),
}

fn is_unit(s: &str) -> bool {
    matches!(
        s.to_lowercase().as_str(),
        "km" | "kms" | "kilometer" | "kilometers" | "kilometre" | "kilometres" | "rs" | "inr"
    )
}

fn canonical_unit(s: &str) -> String {
    let lower = s.to_lowercase();
    match lower.as_str() {
        "km" | "kms" | "kilometer" | "kilometers" | "kilometre" | "kilometres" => "km".into(),
        "rs" | "inr" => "inr".into(),
        _ => lower,
    }
}

/// Split a leading numeral from a trailing alphabetic unit; anything else
/// comes back unchanged as text.
pub fn normalize_value(raw: &str) -> Normalized {
    let s = raw.trim();
    let split = s
        .char_indices()
        .find(|&(_, c)| !(c.is_ascii_digit() || c == '.' || c == ','))
        .map_or(s.len(), |(i, _)| i);
    let (num, rest) = s.split_at(split);
    let unit = rest.trim();
    let parsed = num
        .replace(',', "")
        .parse::<f64>()
        .ok()
        .filter(|_| num.starts_with(|c: char| c.is_ascii_digit()));
    match parsed {
        Some(value) if unit.chars().all(char::is_alphabetic) => Normalized::Number {
            value,
            unit: (!unit.is_empty()).then(|| canonical_unit(unit)),
        },
        _ => Normalized::Text(raw.to_string()),
    }
}

fn number_of(word: &str) -> Option<(f64, Option<String>)> {
    if !is_number_like(word) {
        return None;
    }
    match normalize_value(word) {
        Normalized::Number { value, unit } => Some((value, unit)),
        Normalized::Text(_) => None,
    }
}

/// Parse a rule file.
pub fn parse_rules(text: &str) -> Result<RuleSet, RuleError> {
    let mut set = RuleSet {
        rules: Vec::new(),
        gap: DEFAULT_GAP,
        text_gap: DEFAULT_TEXT_GAP,
    };
    let mut ids = HashSet::new();
    let mut per_attribute: BTreeMap<String, usize> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let mut sc = Scanner::new(raw, line);
        let Some(kind_word) = sc.word() else { continue };
        let invalid = |message: String| RuleError::Invalid { line, message };
        if kind_word == "option" {
            let key = sc.word().ok_or_else(|| invalid("option needs a name".into()))?;
            let value: usize = sc
                .word()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| invalid(format!("option `{key}` needs a non-negative integer")))?;
            match key.as_str() {
                "gap" => set.gap = value,
                "text-gap" => set.text_gap = value,
                other => return Err(invalid(format!("unknown option `{other}`"))),
            }
            sc.end()?;
            continue;
        }
        let kind = match kind_word.as_str() {
            "simple" => RuleKind::Simple,
            "medium" => RuleKind::Medium,
            "complex" => RuleKind::Complex,
            other => {
                return Err(RuleError::UnknownKind {
                    line,
                    kind: other.to_string(),
                })
            }
        };
        let attribute = sc
            .word()
            .ok_or_else(|| invalid("missing attribute name".into()))?;
        let mut templates = Vec::new();
        if let Some(t) = sc.quoted()? {
            templates.push(Template::parse(&t));
            while sc.eat('|') {
                let t = sc
                    .quoted()?
                    .ok_or_else(|| invalid("expected template after `|`".into()))?;
                templates.push(Template::parse(&t));
            }
        }
        let fixed_value = if sc.eat_str("=>") {
            Some(sc.quoted()?.ok_or_else(|| invalid("expected value after `=>`".into()))?)
        } else {
            None
        };
        let explicit_id = if sc.word_is("as") {
            Some(sc.word().ok_or_else(|| invalid("expected id after `as`".into()))?)
        } else {
            None
        };
        sc.end()?;

        if templates.is_empty() {
            return Err(RuleError::NoTemplates { line });
        }
        validate(kind, &templates, fixed_value.is_some(), line)?;
        let id = explicit_id.unwrap_or_else(|| {
            let k = per_attribute.entry(attribute.clone()).or_default();
            *k += 1;
            if *k == 1 {
                attribute.clone()
            } else {
                format!("{attribute}.{k}")
            }
        });
        if !ids.insert(id.clone()) {
            return Err(RuleError::DuplicateId { line, id });
        }
        set.rules.push(PatternRule {
            id,
            attribute,
            kind,
            templates,
            fixed_value,
            line,
        });
    }
    Ok(set)
}

fn validate(kind: RuleKind, templates: &[Template], fixed: bool, line: usize) -> Result<(), RuleError> {
    let invalid = |message: &str| RuleError::Invalid {
        line,
        message: message.to_string(),
    };
    for t in templates {
        if t.elements.is_empty() {
            return Err(invalid("empty template"));
        }
        match kind {
            RuleKind::Simple => {
                if !fixed {
                    return Err(RuleError::MissingFixedValue { line });
                }
                if t.placeholders() > 0 {
                    return Err(invalid("simple templates are literal only"));
                }
            }
            RuleKind::Medium => {
                let numbers = t.count(|e| *e == Element::Number);
                if numbers != 1 || t.literals() != 1 || t.elements.len() != 2 {
                    return Err(invalid("medium templates are one [n] and one term"));
                }
                if fixed {
                    return Err(invalid("medium rules take their value from [n]"));
                }
            }
            RuleKind::Complex => {
                if t.literals() < 2 && t.placeholders() < 2 {
                    return Err(invalid("complex templates need two terms or two placeholders"));
                }
                if t.count(|e| *e == Element::Number) > 1 {
                    return Err(invalid("at most one [n] per template"));
                }
                if t.placeholders() == 0 && !fixed {
                    return Err(invalid("complex template without placeholder needs `=>`"));
                }
            }
        }
    }
    Ok(())
}

/// Cursor over one rule line.
struct Scanner<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Scanner<'a> {
    fn new(raw: &'a str, line: usize) -> Self {
        Scanner { rest: raw, line }
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
        if self.rest.starts_with('#') {
            self.rest = "";
        }
    }

    fn word(&mut self) -> Option<String> {
        self.skip_ws();
        let end = self
            .rest
            .find(|c: char| c.is_whitespace() || c == '"' || c == '|' || c == '#')
            .unwrap_or(self.rest.len());
        if end == 0 {
            return None;
        }
        let (w, rest) = self.rest.split_at(end);
        self.rest = rest;
        Some(w.to_string())
    }

    fn word_is(&mut self, w: &str) -> bool {
        self.skip_ws();
        let next = self.rest.split_whitespace().next();
        if next == Some(w) {
            self.rest = &self.rest[w.len()..];
            true
        } else {
            false
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        match self.rest.strip_prefix(c) {
            Some(r) => {
                self.rest = r;
                true
            }
            None => false,
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        match self.rest.strip_prefix(s) {
            Some(r) => {
                self.rest = r;
                true
            }
            None => false,
        }
    }

    fn quoted(&mut self) -> Result<Option<String>, RuleError> {
        self.skip_ws();
        let Some(body) = self.rest.strip_prefix('"') else {
            return Ok(None);
        };
        match body.find('"') {
            Some(end) => {
                self.rest = &body[end + 1..];
                Ok(Some(body[..end].to_string()))
            }
            None => Err(RuleError::Invalid {
                line: self.line,
                message: "unterminated quote".into(),
            }),
        }
    }

    fn end(&mut self) -> Result<(), RuleError> {
        self.skip_ws();
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(RuleError::Invalid {
                line: self.line,
                message: format!("unexpected `{}`", self.rest),
            })
        }
    }
}
