//! Theme concept: the noun that is a sentence subject and also among the
//! most frequent concepts of the passage.

use std::collections::HashMap;

use crate::textprep::TaggedToken;
use crate::triplet::Triple;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    /// First-seen surface form.
    pub name: String,
    pub count: usize,
    /// Order of first occurrence in the document.
    pub first: usize,
}

/// Noun concepts with case-insensitive occurrence counts.
#[derive(Debug, Clone, Default)]
pub struct ConceptSet {
    concepts: Vec<Concept>,
    index: HashMap<String, usize>,
}

impl ConceptSet {
    pub fn add(&mut self, surface: &str) {
        let key = surface.to_lowercase();
        match self.index.get(&key) {
            Some(&i) => self.concepts[i].count += 1,
            None => {
                self.index.insert(key, self.concepts.len());
                self.concepts.push(Concept {
                    name: surface.to_string(),
                    count: 1,
                    first: self.concepts.len(),
                });
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&Concept> {
        self.index
            .get(&name.to_lowercase())
            .map(|&i| &self.concepts[i])
    }

    pub fn count(&self, name: &str) -> usize {
        self.get(name).map_or(0, |c| c.count)
    }

    /// Concepts in first-occurrence order.
    pub fn iter(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.iter()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.concepts.iter().map(|c| c.count).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThemeResult {
    pub theme: Option<String>,
    pub candidates: Vec<String>,
    pub subjects: Vec<String>,
    pub relaxed: bool,
}

/// Each noun token is one occurrence; runs of adjacent proper nouns merge
/// into a single multi-word concept.
pub fn collect_concepts(sentences: &[Vec<TaggedToken>]) -> ConceptSet {
    let mut set = ConceptSet::default();
    for sentence in sentences {
        let mut run: Vec<&str> = Vec::new();
        for t in sentence {
            let word = t.token.surface.as_str();
            let wordlike = word.chars().any(char::is_alphanumeric);
            if t.tag.is_proper_noun() && wordlike {
                run.push(word);
                continue;
            }
            if !run.is_empty() {
                set.add(&run.join(" "));
                run.clear();
            }
            if t.tag.is_noun() && wordlike {
                set.add(word);
            }
        }
        if !run.is_empty() {
            set.add(&run.join(" "));
        }
    }
    set
}

/// Distinct subjects in first-occurrence order.
pub fn collect_subjects(triples: &[Triple]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in triples {
        if !out.contains(&t.subject) {
            out.push(t.subject.clone());
        }
    }
    out
}

/// Every concept whose count equals the maximum, in occurrence order.
pub fn max_occur_concepts(cs: &ConceptSet) -> Vec<String> {
    let max = cs.iter().map(|c| c.count).max().unwrap_or(0);
    cs.iter()
        .filter(|c| c.count == max)
        .map(|c| c.name.clone())
        .collect()
}

/// A subject names a concept when it equals the concept or its last word,
/// ignoring case.
fn names(subject: &str, concept: &str) -> bool {
    let subject = subject.to_lowercase();
    let concept = concept.to_lowercase();
    let last = concept.rsplit(' ').next().unwrap_or(&concept);
    subject == concept || subject == last
}

fn best<'a>(it: impl Iterator<Item = &'a Concept>) -> Option<&'a Concept> {
    it.min_by_key(|c| (std::cmp::Reverse(c.count), c.first))
}

pub fn identify_theme(cs: &ConceptSet, subjects: &[String], maxocc: &[String]) -> ThemeResult {
    let is_subject = |c: &Concept| subjects.iter().any(|s| names(s, &c.name));
    let in_max = |c: &Concept| {
        let name = c.name.to_lowercase();
        maxocc.iter().any(|m| m.to_lowercase() == name)
    };

    let strict = best(cs.iter().filter(|c| in_max(c) && is_subject(c)));
    let (theme, relaxed) = match strict {
        Some(c) => (Some(c.name.clone()), false),
        None => match best(cs.iter().filter(|c| is_subject(c))) {
            Some(c) => (Some(c.name.clone()), true),
            None => (None, false),
        },
    };
    ThemeResult {
        theme,
        candidates: maxocc.to_vec(),
        subjects: subjects.to_vec(),
        relaxed,
    }
}
