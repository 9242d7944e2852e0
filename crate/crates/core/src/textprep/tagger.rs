use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::token::Token;

/// Penn tagset subset; `Other` absorbs every tag outside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    NN,
    NNS,
    NNP,
    NNPS,
    VB,
    VBD,
    VBG,
    VBN,
    VBP,
    VBZ,
    JJ,
    IN,
    DT,
    CD,
    CC,
    TO,
    RB,
    Other,
}

impl Tag {
    pub const ALL: [Tag; 18] = [
        Tag::NN,
        Tag::NNS,
        Tag::NNP,
        Tag::NNPS,
        Tag::VB,
        Tag::VBD,
        Tag::VBG,
        Tag::VBN,
        Tag::VBP,
        Tag::VBZ,
        Tag::JJ,
        Tag::IN,
        Tag::DT,
        Tag::CD,
        Tag::CC,
        Tag::TO,
        Tag::RB,
        Tag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::NN => "NN",
            Tag::NNS => "NNS",
            Tag::NNP => "NNP",
            Tag::NNPS => "NNPS",
            Tag::VB => "VB",
            Tag::VBD => "VBD",
            Tag::VBG => "VBG",
            Tag::VBN => "VBN",
            Tag::VBP => "VBP",
            Tag::VBZ => "VBZ",
            Tag::JJ => "JJ",
            Tag::IN => "IN",
            Tag::DT => "DT",
            Tag::CD => "CD",
            Tag::CC => "CC",
            Tag::TO => "TO",
            Tag::RB => "RB",
            Tag::Other => "OTHER",
        }
    }

    pub fn is_noun(self) -> bool {
        matches!(self, Tag::NN | Tag::NNS | Tag::NNP | Tag::NNPS)
    }

    pub fn is_proper_noun(self) -> bool {
        matches!(self, Tag::NNP | Tag::NNPS)
    }

    pub fn is_verb(self) -> bool {
        matches!(
            self,
            Tag::VB | Tag::VBD | Tag::VBG | Tag::VBN | Tag::VBP | Tag::VBZ
        )
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = ();

    /// Tags outside the subset map to `Other`; this never fails.
    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(Tag::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .unwrap_or(Tag::Other))
    }
}

/// Noun tests on raw labels, for trees that came from bracketed input.
pub(crate) fn label_is_noun(label: &str) -> bool {
    matches!(label, "NN" | "NNS" | "NNP" | "NNPS")
}

pub(crate) fn label_is_verb(label: &str) -> bool {
    matches!(label, "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: Tag,
}

#[derive(Debug, thiserror::Error)]
pub enum TagLexiconError {
    #[error("line {line}: expected `word<TAB>TAG`")]
    Malformed { line: usize },
    #[error("line {line}: unknown tag `{tag}`")]
    UnknownTag { line: usize, tag: String },
}

/// Lowercase word → tag lookup table.
#[derive(Debug, Clone, Default)]
pub struct TagLexicon {
    entries: HashMap<String, Tag>,
}

const BUNDLED: &str = include_str!("../../data/tags.tsv");

impl TagLexicon {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled tag lexicon is well-formed")
    }

    pub fn parse(text: &str) -> Result<Self, TagLexiconError> {
        let mut entries = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let (word, tag) = match (parts.next(), parts.next(), parts.next()) {
                (Some(w), Some(t), None) if !w.trim().is_empty() => (w.trim(), t.trim()),
                _ => return Err(TagLexiconError::Malformed { line: n + 1 }),
            };
            let parsed: Tag = tag.parse().unwrap();
            if parsed == Tag::Other && tag != "OTHER" {
                return Err(TagLexiconError::UnknownTag {
                    line: n + 1,
                    tag: tag.to_string(),
                });
            }
            entries.insert(word.to_lowercase(), parsed);
        }
        Ok(TagLexicon { entries })
    }

    pub fn get(&self, word: &str) -> Option<Tag> {
        self.entries.get(&word.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Tag one sentence's tokens. Lexicon first, then the fallback chain.
pub fn pos_tag(tokens: &[Token], lex: &TagLexicon) -> Vec<TaggedToken> {
    tokens
        .iter()
        .enumerate()
        .map(|(i, t)| TaggedToken {
            token: t.clone(),
            tag: tag_word(&t.surface, i == 0, lex),
        })
        .collect()
}

fn tag_word(surface: &str, initial: bool, lex: &TagLexicon) -> Tag {
    if let Some(tag) = lex.get(surface) {
        return tag;
    }
    if !surface.chars().any(char::is_alphanumeric) {
        return Tag::Other;
    }
    if is_number_like(surface) {
        return Tag::CD;
    }
    let capitalized = surface.chars().next().is_some_and(char::is_uppercase);
    if capitalized && !initial {
        return Tag::NNP;
    }
    let lower = surface.to_lowercase();
    if lower.ends_with("ing") && lower.len() > 4 {
        Tag::VBG
    } else if lower.ends_with("ed") && lower.len() > 3 {
        Tag::VBN
    } else if lower.ends_with("ly") && lower.len() > 3 {
        Tag::RB
    } else if capitalized {
        // sentence-initial and not lexical: most likely a name
        Tag::NNP
    } else if lower.len() > 1
        && lower.ends_with('s')
        && lex.get(&lower[..lower.len() - 1]).is_some()
    {
        Tag::NNS
    } else {
        Tag::NN
    }
}

/// Digits (with optional `.`/`,` separators) optionally followed by a unit
/// made of letters, e.g. `56`, `12.5`, `17kms`.
pub(crate) fn is_number_like(s: &str) -> bool {
    let digits_end = s
        .char_indices()
        .find(|&(_, c)| !(c.is_ascii_digit() || c == '.' || c == ','))
        .map_or(s.len(), |(i, _)| i);
    let (num, unit) = s.split_at(digits_end);
    num.chars().next().is_some_and(|c| c.is_ascii_digit())
        && unit.chars().all(char::is_alphabetic)
}
