//! Subject / predicate / object extraction over a constituency tree.
//!
//! * subject: the first NP met in breadth-first order; inside it, the first
//!   noun preterminal in breadth-first order.
//! * predicate: the first VP in breadth-first order; inside it, the deepest
//!   verb preterminal, leftmost on ties.
//! * object: within the predicate's VP (or the whole tree when there is no
//!   VP), the first PP holding a noun, else the first such ADJP, else the
//!   first such NP; the answer is that subtree's first noun in leaf order.

use crate::textprep::tagger::{label_is_noun, label_is_verb};
use crate::textprep::ParseTree;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: String,
    pub sentence_index: usize,
}

fn first_phrase<'a>(tree: &'a ParseTree, label: &str) -> Option<&'a ParseTree> {
    tree.bfs()
        .map(|(n, _)| n)
        .find(|n| !n.is_preterminal() && n.label == label)
}

pub fn extract_subject(tree: &ParseTree) -> Option<&str> {
    first_phrase(tree, "NP")?
        .bfs()
        .find(|(n, _)| label_is_noun(&n.label))
        .and_then(|(n, _)| n.leaf.as_deref())
}

pub fn extract_predicate(tree: &ParseTree) -> Option<&str> {
    let vp = first_phrase(tree, "VP")?;
    let mut best: Option<(&str, usize)> = None;
    for (node, depth) in vp.dfs() {
        if let (Some(word), true) = (node.leaf.as_deref(), label_is_verb(&node.label)) {
            if best.map_or(true, |(_, d)| depth > d) {
                best = Some((word, depth));
            }
        }
    }
    best.map(|(w, _)| w)
}

fn first_noun_leaf(tree: &ParseTree) -> Option<&str> {
    tree.dfs()
        .find(|(n, _)| label_is_noun(&n.label) && n.is_preterminal())
        .and_then(|(n, _)| n.leaf.as_deref())
}

pub fn extract_object(tree: &ParseTree) -> Option<&str> {
    let scope = first_phrase(tree, "VP").unwrap_or(tree);
    ["PP", "ADJP", "NP"].iter().find_map(|&label| {
        scope
            .bfs()
            .skip(1)
            .filter(|(n, _)| !n.is_preterminal() && n.label == label)
            .find_map(|(n, _)| first_noun_leaf(n))
    })
}

pub fn extract_triple(tree: &ParseTree, sentence_index: usize) -> Option<Triple> {
    Some(Triple {
        subject: extract_subject(tree)?.to_string(),
        predicate: extract_predicate(tree)?.to_string(),
        object: extract_object(tree)?.to_string(),
        sentence_index,
    })
}
