//! Domain inference from weighted semantic lexicons.
//!
//! Precedence when choosing a domain: a user hint, then a unique explicit
//! mention of a domain class name, then the highest positive lexicon
//! score. Ties and all-zero scores leave the domain undetermined.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::{self, Write};

use crate::store::OntologySchema;
use crate::textprep::TaggedToken;

const WORDS: &str = include_str!("../data/words.txt");
const HOTEL_LEXICON: &str = include_str!("../data/hotel.lexicon");
const HOSPITAL_LEXICON: &str = include_str!("../data/hospital.lexicon");
pub const HOTEL_SEED: &str = include_str!("../data/hotel-seed.lexicon");
pub const HOSPITAL_SEED: &str = include_str!("../data/hospital-seed.lexicon");

/// Split pieces too generic to stand alone as lexicon terms.
const STOP_PIECES: &[&str] = &["num", "dist", "from", "str", "amt", "on", "stn"];

#[derive(Debug, Clone, PartialEq)]
pub struct SemanticLexicon {
    pub domain: String,
    /// Class names that count as explicit mentions of this domain.
    pub classes: Vec<String>,
    pub terms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: missing `domain:` header")]
    MissingDomain { line: usize },
    #[error("line {line}: weight must be a positive number, got `{found}`")]
    BadWeight { line: usize, found: String },
    #[error("line {line}: malformed entry")]
    Malformed { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("no lexicons registered")]
    NoLexicons,
    #[error("unknown domain hint `{hint}`; registered: {}", registered.join(", "))]
    UnknownHint {
        hint: String,
        registered: Vec<String>,
    },
}

impl SemanticLexicon {
    pub fn hotel() -> Self {
        parse_lexicon(HOTEL_LEXICON).expect("bundled hotel lexicon is valid")
    }

    pub fn hospital() -> Self {
        parse_lexicon(HOSPITAL_LEXICON).expect("bundled hospital lexicon is valid")
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|w| *w *= factor);
        out
    }
}

impl fmt::Display for SemanticLexicon {
    /// Lexicon file form; reads back with `parse_lexicon`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain: {}", self.domain)?;
        if !self.classes.is_empty() {
            writeln!(f, "classes: {}", self.classes.join(" "))?;
        }
        for (term, w) in &self.terms {
            writeln!(f, "{term}\t{w}")?;
        }
        Ok(())
    }
}

/// Parse a lexicon file: `domain: <name>`, optional `classes: A B`, then
/// `term<TAB>weight` lines (weight defaults to 1).
pub fn parse_lexicon(text: &str) -> Result<SemanticLexicon, LexiconError> {
    let mut domain = None;
    let mut classes = Vec::new();
    let mut terms = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        if let Some(d) = body.strip_prefix("domain:") {
            domain = Some(d.trim().to_string()).filter(|d| !d.is_empty());
            continue;
        }
        if domain.is_none() {
            return Err(LexiconError::MissingDomain { line });
        }
        if let Some(c) = body.strip_prefix("classes:") {
            classes.extend(c.split_whitespace().map(str::to_string));
            continue;
        }
        let mut parts = body.split('\t');
        let term = parts.next().unwrap_or("").trim().to_lowercase();
        let weight = match parts.next() {
            None => 1.0,
            Some(w) => match w.trim().parse::<f64>() {
                Ok(x) if x > 0.0 && x.is_finite() => x,
                _ => {
                    return Err(LexiconError::BadWeight {
                        line,
                        found: w.trim().to_string(),
                    })
                }
            },
        };
        if term.is_empty() || parts.next().is_some() {
            return Err(LexiconError::Malformed { line });
        }
        let slot = terms.entry(term).or_insert(weight);
        *slot = f64::max(*slot, weight);
    }
    let domain = domain.ok_or(LexiconError::MissingDomain {
        line: text.lines().count().max(1),
    })?;
    Ok(SemanticLexicon {
        domain,
        classes,
        terms,
    })
}

fn word_list() -> HashSet<&'static str> {
    WORDS
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace)
        .collect()
}

/// Split an identifier on underscores and lower/upper case boundaries.
fn identifier_pieces(name: &str) -> Vec<String> {
    let mut out = Vec::new();
    for part in name.split(['_', '-']) {
        let mut cur = String::new();
        let mut prev_lower = false;
        for c in part.chars() {
            if c.is_uppercase() && prev_lower && !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            prev_lower = c.is_lowercase() || c.is_ascii_digit();
            cur.extend(c.to_lowercase());
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

/// Segment `w` into the fewest dictionary words; `None` when impossible.
fn segment(w: &str, dict: &HashSet<&str>) -> Option<Vec<String>> {
    let chars: Vec<char> = w.chars().collect();
    let n = chars.len();
    let mut best: Vec<Option<(usize, usize)>> = vec![None; n + 1];
    best[0] = Some((0, 0));
    for end in 1..=n {
        for start in 0..end {
            let Some((k, _)) = best[start] else { continue };
            let piece: String = chars[start..end].iter().collect();
            if dict.contains(piece.as_str()) && best[end].map_or(true, |(b, _)| k + 1 < b) {
                best[end] = Some((k + 1, start));
            }
        }
    }
    best[n]?;
    let mut out = Vec::new();
    let mut end = n;
    while end > 0 {
        let (_, start) = best[end].unwrap();
        out.push(chars[start..end].iter().collect());
        end = start;
    }
    out.reverse();
    Some(out)
}

/// Word forms of an attribute or class name: the joined lowercase form,
/// the space-separated phrase, and each content word.
pub fn name_forms(name: &str) -> Vec<String> {
    let dict = word_list();
    let pieces = identifier_pieces(name);
    let words: Vec<String> = pieces
        .iter()
        .flat_map(|p| segment(p, &dict).unwrap_or_else(|| vec![p.clone()]))
        .collect();
    let mut out = vec![pieces.concat()];
    if words.len() > 1 {
        out.push(words.join(" "));
        out.extend(
            words
                .iter()
                .filter(|w| w.chars().count() >= 3 && !STOP_PIECES.contains(&w.as_str()))
                .cloned(),
        );
    }
    let mut seen = HashSet::new();
    out.retain(|w| seen.insert(w.clone()));
    out
}

/// Lexicon from class and attribute names plus `extra` terms. Derived terms
/// weigh 1; duplicates keep the larger weight.
pub fn derive_lexicon(domain: &str, schema: &OntologySchema, extra: &[(String, f64)]) -> SemanticLexicon {
    let mut terms: BTreeMap<String, f64> = BTreeMap::new();
    let mut add = |t: String, w: f64| {
        let slot = terms.entry(t).or_insert(w);
        *slot = f64::max(*slot, w);
    };
    for class in &schema.classes {
        for form in name_forms(class) {
            add(form, 1.0);
        }
    }
    for attr in schema.attributes.keys() {
        for form in name_forms(attr) {
            add(form, 1.0);
        }
    }
    for (t, w) in extra {
        add(t.trim().to_lowercase(), *w);
    }
    SemanticLexicon {
        domain: domain.to_string(),
        classes: schema.classes.clone(),
        terms,
    }
}

/// Token matches a word when equal ignoring case, or equal after removing
/// one trailing `s` from the token.
fn word_matches(token: &str, word: &str) -> bool {
    lower_matches(&token.to_lowercase(), word)
}

fn lower_matches(t: &str, word: &str) -> bool {
    t == word || t.strip_suffix('s').is_some_and(|s| s == word)
}

/// Class names mentioned as whole tokens, in schema spelling.
pub fn explicit_mentions<'a>(
    tokens: &[TaggedToken],
    class_names: impl IntoIterator<Item = &'a str>,
) -> BTreeSet<String> {
    class_names
        .into_iter()
        .filter(|c| {
            let c = c.to_lowercase();
            tokens.iter().any(|t| word_matches(&t.token.surface, &c))
        })
        .map(str::to_string)
        .collect()
}

/// Weighted count of distinct lexicon terms present in the text; each term
/// counts once however often it occurs.
pub fn lexicon_score(tokens: &[TaggedToken], lex: &SemanticLexicon) -> (f64, Vec<String>) {
    let lower: Vec<String> = tokens.iter().map(|t| t.token.surface.to_lowercase()).collect();
    let mut score = 0.0;
    let mut matched = Vec::new();
    for (term, weight) in &lex.terms {
        let words: Vec<&str> = term.split_whitespace().collect();
        if words.is_empty() || words.len() > lower.len() {
            continue;
        }
        let found = lower
            .windows(words.len())
            .any(|win| win.iter().zip(&words).all(|(t, w)| lower_matches(t, w)));
        if found {
            score += weight;
            matched.push(term.clone());
        }
    }
    (score, matched)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionRule {
    Explicit,
    Lexicon,
    Hint,
    Undetermined,
}

impl DecisionRule {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionRule::Explicit => "explicit",
            DecisionRule::Lexicon => "lexicon",
            DecisionRule::Hint => "hint",
            DecisionRule::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for DecisionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainDecision {
    pub domain: Option<String>,
    pub scores: BTreeMap<String, f64>,
    pub matched: BTreeMap<String, Vec<String>>,
    /// Domains whose class names occur in the text.
    pub mentioned: Vec<String>,
    pub rule: DecisionRule,
}

impl DomainDecision {
    /// `key=value` lines for the CLI.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "domain={}", self.domain.as_deref().unwrap_or("")).unwrap();
        writeln!(out, "rule={}", self.rule).unwrap();
        for (d, s) in &self.scores {
            writeln!(out, "score.{d}={s}\tmatched={}", self.matched[d].join(",")).unwrap();
        }
        out
    }
}

pub fn infer_domain(
    tokens: &[TaggedToken],
    lexicons: &[SemanticLexicon],
    hint: Option<&str>,
) -> Result<DomainDecision, DomainError> {
    if lexicons.is_empty() {
        return Err(DomainError::NoLexicons);
    }
    let mut scores = BTreeMap::new();
    let mut matched = BTreeMap::new();
    let mut mentioned = Vec::new();
    for lex in lexicons {
        let (s, m) = lexicon_score(tokens, lex);
        scores.insert(lex.domain.clone(), s);
        matched.insert(lex.domain.clone(), m);
        if !explicit_mentions(tokens, lex.classes.iter().map(String::as_str)).is_empty() {
            mentioned.push(lex.domain.clone());
        }
    }
    let mut decision = DomainDecision {
        domain: None,
        scores,
        matched,
        mentioned,
        rule: DecisionRule::Undetermined,
    };

    if let Some(h) = hint {
        let found = lexicons.iter().find(|l| l.domain.eq_ignore_ascii_case(h));
        return match found {
            Some(l) => {
                decision.domain = Some(l.domain.clone());
                decision.rule = DecisionRule::Hint;
                Ok(decision)
            }
            None => Err(DomainError::UnknownHint {
                hint: h.to_string(),
                registered: lexicons.iter().map(|l| l.domain.clone()).collect(),
            }),
        };
    }
    if let [only] = decision.mentioned.as_slice() {
        decision.domain = Some(only.clone());
        decision.rule = DecisionRule::Explicit;
        return Ok(decision);
    }
    let max = decision.scores.values().copied().fold(0.0, f64::max);
    if max > 0.0 {
        let top: Vec<&String> = decision
            .scores
            .iter()
            .filter(|(_, &s)| s == max)
            .map(|(d, _)| d)
            .collect();
        if let [winner] = top.as_slice() {
            decision.domain = Some((*winner).clone());
            decision.rule = DecisionRule::Lexicon;
        }
    }
    Ok(decision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textprep::{pos_tag, tokenize, TagLexicon};

    fn tagged(s: &str) -> Vec<TaggedToken> {
        pos_tag(&tokenize(s), &TagLexicon::bundled())
    }

    fn lex(domain: &str, classes: &[&str], terms: &[&str]) -> SemanticLexicon {
        SemanticLexicon {
            domain: domain.into(),
            classes: classes.iter().map(|s| s.to_string()).collect(),
            terms: terms.iter().map(|t| (t.to_string(), 1.0)).collect(),
        }
    }

    #[test]
    fn identifier_splitting() {
        assert_eq!(identifier_pieces("shoppingArcade"), ["shopping", "arcade"]);
        assert_eq!(identifier_pieces("meeting_facility"), ["meeting", "facility"]);
        assert_eq!(identifier_pieces("Jacuzzi"), ["jacuzzi"]);
    }

    #[test]
    fn dictionary_split() {
        assert_eq!(
            name_forms("distfromairport"),
            ["distfromairport", "dist from airport", "airport"]
        );
        assert_eq!(
            name_forms("swimmingpool"),
            ["swimmingpool", "swimming pool", "swimming", "pool"]
        );
        assert_eq!(name_forms("conciierge"), ["conciierge"]);
        assert_eq!(name_forms("numrooms"), ["numrooms", "num rooms", "rooms"]);
    }

    #[test]
    fn derived_hotel_terms() {
        let l = derive_lexicon("hotel", &OntologySchema::hotel(), &[]);
        for t in ["hotel", "restaurant", "spa", "swimming pool", "airport", "distfromairport"] {
            assert!(l.terms.contains_key(t), "{t}");
        }
        assert!(!l.terms.contains_key("from"));
        let empty = derive_lexicon("x", &OntologySchema::default(), &[("Serve".into(), 1.0)]);
        assert_eq!(empty.terms.len(), 1);
        assert_eq!(empty.terms["serve"], 1.0);
    }

    #[test]
    fn duplicate_terms_keep_max_weight() {
        let l = derive_lexicon(
            "hotel",
            &OntologySchema::hotel(),
            &[("spa".into(), 3.0), ("spa".into(), 2.0)],
        );
        assert_eq!(l.terms["spa"], 3.0);
    }

    #[test]
    fn bundled_lexicons_are_derived() {
        let seed = parse_lexicon(HOTEL_SEED).unwrap();
        let extra: Vec<_> = seed.terms.into_iter().collect();
        assert_eq!(
            derive_lexicon("hotel", &OntologySchema::hotel(), &extra),
            SemanticLexicon::hotel()
        );
        let seed = parse_lexicon(HOSPITAL_SEED).unwrap();
        let extra: Vec<_> = seed.terms.into_iter().collect();
        assert_eq!(
            derive_lexicon("hospital", &OntologySchema::hospital(), &extra),
            SemanticLexicon::hospital()
        );
    }

    #[test]
    fn lexicon_file_round_trip() {
        let l = SemanticLexicon::hotel();
        assert_eq!(parse_lexicon(&l.to_string()).unwrap(), l);
        assert_eq!(
            parse_lexicon("serve\t1"),
            Err(LexiconError::MissingDomain { line: 1 })
        );
        assert!(matches!(
            parse_lexicon("domain: x\nserve\t0"),
            Err(LexiconError::BadWeight { line: 2, .. })
        ));
        let l = parse_lexicon("domain: x\nswimming pool\nspa\t2.5\n").unwrap();
        assert_eq!(l.terms["swimming pool"], 1.0);
        assert_eq!(l.terms["spa"], 2.5);
    }

    #[test]
    fn explicit_mention_rule() {
        let classes = ["Hotel", "Hospital"];
        assert_eq!(
            explicit_mentions(&tagged("a fine hotel in town"), classes),
            BTreeSet::from(["Hotel".to_string()])
        );
        assert!(explicit_mentions(&tagged("a fine inn"), classes).is_empty());
        assert_eq!(
            explicit_mentions(&tagged("Hotels of the city"), classes),
            BTreeSet::from(["Hotel".to_string()])
        );
    }

    #[test]
    fn scoring_counts_distinct_terms_and_multiword() {
        let l = lex("hotel", &[], &["buffet", "swimming pool", "spa"]);
        let (s, m) = lexicon_score(&tagged("buffet buffet and a swimming pool"), &l);
        assert_eq!(s, 2.0);
        assert_eq!(m, ["buffet", "swimming pool"]);
        let (doubled, _) = lexicon_score(&tagged("buffet buffet and a swimming pool"), &l.scaled(2.0));
        assert_eq!(doubled, 4.0);
    }

    #[test]
    fn precedence() {
        let hotel = lex("hotel", &["Hotel"], &["buffet", "doctor"]);
        let hospital = lex("hospital", &["Hospital"], &["surgery", "doctor"]);
        let lexes = [hotel, hospital];

        let d = infer_domain(&tagged(""), &lexes, None).unwrap();
        assert_eq!((d.domain, d.rule), (None, DecisionRule::Undetermined));

        let tie = tagged("a doctor serves the buffet after surgery");
        let d = infer_domain(&tie, &lexes, None).unwrap();
        assert_eq!(d.scores["hotel"], 2.0);
        assert_eq!(d.scores["hospital"], 2.0);
        assert_eq!((d.domain, d.rule), (None, DecisionRule::Undetermined));

        let d = infer_domain(&tie, &lexes, Some("hotel")).unwrap();
        assert_eq!((d.domain.as_deref(), d.rule), (Some("hotel"), DecisionRule::Hint));

        let d = infer_domain(&tagged("the hospital has a buffet"), &lexes, None).unwrap();
        assert_eq!((d.domain.as_deref(), d.rule), (Some("hospital"), DecisionRule::Explicit));

        let d = infer_domain(&tagged("hotel or hospital , buffet"), &lexes, None).unwrap();
        assert_eq!((d.domain.as_deref(), d.rule), (Some("hotel"), DecisionRule::Lexicon));

        assert!(matches!(
            infer_domain(&tie, &lexes, Some("bank")),
            Err(DomainError::UnknownHint { .. })
        ));
        assert_eq!(infer_domain(&tie, &[], None), Err(DomainError::NoLexicons));
    }
}
