#![allow(dead_code)]

use std::collections::BTreeSet;

use obie::store::{
    Datatype, PatternTerm, Query, RdfTerm, RdfTriple, TriplePattern, DEFAULT_BASE, RDF_TYPE,
};
use obie::textprep::ParseTree;
use rand::seq::SliceRandom;
use rand::Rng;

const PHRASES: &[&str] = &["S", "NP", "VP", "PP", "ADJP"];
const TAGS: &[&str] = &[
    "NN", "NNS", "NNP", "NNPS", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "DT", "IN", "JJ", "CD",
];
const NOUNS: &[&str] = &["NN", "NNS", "NNP", "NNPS"];
const VERBS: &[&str] = &["VB", "VBD", "VBG", "VBN", "VBP", "VBZ"];

/// Random tree with distinct leaf words, at most `max_depth` levels of
/// phrases and `max_branch` children per phrase.
pub fn random_tree(rng: &mut impl Rng, max_depth: usize, max_branch: usize) -> ParseTree {
    let mut counter = 0;
    let children = (0..rng.gen_range(1..=max_branch))
        .map(|_| grow(rng, 1, max_depth, max_branch, &mut counter))
        .collect();
    ParseTree::node("S", children)
}

fn grow(rng: &mut impl Rng, depth: usize, max_depth: usize, max_branch: usize, counter: &mut usize) -> ParseTree {
    if depth >= max_depth || rng.gen_bool(0.35) {
        *counter += 1;
        return ParseTree::preterminal(*TAGS.choose(rng).unwrap(), format!("w{counter}"));
    }
    let children = (0..rng.gen_range(1..=max_branch))
        .map(|_| grow(rng, depth + 1, max_depth, max_branch, counter))
        .collect();
    ParseTree::node(*PHRASES.choose(rng).unwrap(), children)
}

/// Every node with its child-index path from the root.
fn nodes_with_paths(tree: &ParseTree) -> Vec<(Vec<usize>, &ParseTree)> {
    fn walk<'a>(t: &'a ParseTree, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a ParseTree)>) {
        out.push((path.clone(), t));
        for (i, c) in t.children.iter().enumerate() {
            path.push(i);
            walk(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(tree, &mut Vec::new(), &mut out);
    out
}

/// Level order is the order of (depth, path).
fn level_order(tree: &ParseTree) -> Vec<(Vec<usize>, &ParseTree)> {
    let mut v = nodes_with_paths(tree);
    v.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    v
}

/// Pre-order is the lexicographic order of paths.
fn pre_order(tree: &ParseTree) -> Vec<(Vec<usize>, &ParseTree)> {
    let mut v = nodes_with_paths(tree);
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

fn is_phrase(t: &ParseTree, label: &str) -> bool {
    t.leaf.is_none() && t.label == label
}

pub fn oracle_subject(tree: &ParseTree) -> Option<String> {
    let (_, np) = level_order(tree).into_iter().find(|(_, n)| is_phrase(n, "NP"))?;
    level_order(np)
        .into_iter()
        .find(|(_, n)| NOUNS.contains(&n.label.as_str()) && n.leaf.is_some())
        .and_then(|(_, n)| n.leaf.clone())
}

pub fn oracle_predicate(tree: &ParseTree) -> Option<String> {
    let (_, vp) = level_order(tree).into_iter().find(|(_, n)| is_phrase(n, "VP"))?;
    let verbs: Vec<_> = pre_order(vp)
        .into_iter()
        .filter(|(_, n)| VERBS.contains(&n.label.as_str()) && n.leaf.is_some())
        .collect();
    let deepest = verbs.iter().map(|(p, _)| p.len()).max()?;
    verbs
        .into_iter()
        .find(|(p, _)| p.len() == deepest)
        .and_then(|(_, n)| n.leaf.clone())
}

pub fn oracle_object(tree: &ParseTree) -> Option<String> {
    let scope = level_order(tree)
        .into_iter()
        .find(|(_, n)| is_phrase(n, "VP"))
        .map_or(tree, |(_, n)| n);
    let first_noun = |t: &ParseTree| {
        t.leaves()
            .into_iter()
            .zip(preterminal_labels(t))
            .find(|(_, l)| NOUNS.contains(&l.as_str()))
            .map(|(w, _)| w.to_string())
    };
    for label in ["PP", "ADJP", "NP"] {
        let hit = level_order(scope)
            .into_iter()
            .filter(|(p, n)| !p.is_empty() && is_phrase(n, label))
            .find_map(|(_, n)| first_noun(n));
        if hit.is_some() {
            return hit;
        }
    }
    None
}

fn preterminal_labels(t: &ParseTree) -> Vec<String> {
    pre_order(t)
        .into_iter()
        .filter(|(_, n)| n.leaf.is_some())
        .map(|(_, n)| n.label.clone())
        .collect()
}

pub fn iri(local: &str) -> String {
    format!("{DEFAULT_BASE}{local}")
}

/// Small vocabulary so joins hit often.
pub fn vocabulary() -> (Vec<RdfTerm>, Vec<String>) {
    let mut objects: Vec<RdfTerm> = ["h1", "h2", "h3", "Hotel", "c1"].iter().map(|l| RdfTerm::Iri(iri(l))).collect();
    objects.push(RdfTerm::literal("56", Datatype::Integer));
    objects.push(RdfTerm::literal("10.0", Datatype::Decimal));
    objects.push(RdfTerm::literal("true", Datatype::Boolean));
    objects.push(RdfTerm::literal("spa", Datatype::String));
    let mut predicates: Vec<String> = ["p", "q", "r"].iter().map(|l| iri(l)).collect();
    predicates.push(RDF_TYPE.to_string());
    (objects, predicates)
}

pub fn random_graph(rng: &mut impl Rng, max: usize) -> BTreeSet<RdfTriple> {
    let (objects, predicates) = vocabulary();
    let subjects: Vec<String> = ["h1", "h2", "h3", "c1"].iter().map(|l| iri(l)).collect();
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| {
            RdfTriple::new(
                subjects.choose(rng).unwrap().clone(),
                predicates.choose(rng).unwrap().clone(),
                objects.choose(rng).unwrap().clone(),
            )
        })
        .collect()
}

pub fn random_query(rng: &mut impl Rng, max_patterns: usize) -> Query {
    let (objects, predicates) = vocabulary();
    let vars = ["a", "b", "c", "d"];
    let preds: Vec<RdfTerm> = predicates.into_iter().map(RdfTerm::Iri).collect();
    let patterns: Vec<TriplePattern> = (0..rng.gen_range(1..=max_patterns))
        .map(|_| TriplePattern {
            subject: pick(rng, &vars, &objects),
            predicate: pick(rng, &vars, &preds),
            object: pick(rng, &vars, &objects),
        })
        .collect();
    let mut present: Vec<String> = Vec::new();
    for p in &patterns {
        for t in p.positions() {
            if let PatternTerm::Var(v) = t {
                if !present.contains(v) {
                    present.push(v.clone());
                }
            }
        }
    }
    present.shuffle(rng);
    let keep = if present.is_empty() { 0 } else { rng.gen_range(1..=present.len()) };
    present.truncate(keep);
    Query {
        select: present,
        patterns,
        prefixes: Default::default(),
    }
}

fn pick(rng: &mut impl Rng, vars: &[&str], consts: &[RdfTerm]) -> PatternTerm {
    if rng.gen_bool(0.6) {
        PatternTerm::Var(vars.choose(rng).unwrap().to_string())
    } else {
        PatternTerm::Term(consts.choose(rng).unwrap().clone())
    }
}

/// Try every assignment of the query variables over all terms in the graph.
pub fn oracle_query(triples: &BTreeSet<RdfTriple>, q: &Query) -> BTreeSet<Vec<RdfTerm>> {
    let mut domain: BTreeSet<RdfTerm> = BTreeSet::new();
    for t in triples {
        domain.insert(RdfTerm::Iri(t.subject.clone()));
        domain.insert(RdfTerm::Iri(t.predicate.clone()));
        domain.insert(t.object.clone());
    }
    let domain: Vec<RdfTerm> = domain.into_iter().collect();
    let mut vars: Vec<String> = Vec::new();
    for p in &q.patterns {
        for t in p.positions() {
            if let PatternTerm::Var(v) = t {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    if domain.is_empty() {
        return out;
    }
    let total = domain.len().pow(vars.len() as u32);
    for mut code in 0..total {
        let mut value = Vec::with_capacity(vars.len());
        for _ in 0..vars.len() {
            value.push(&domain[code % domain.len()]);
            code /= domain.len();
        }
        let resolve = |t: &PatternTerm| -> RdfTerm {
            match t {
                PatternTerm::Term(c) => c.clone(),
                PatternTerm::Var(v) => value[vars.iter().position(|x| x == v).unwrap()].clone(),
            }
        };
        let all = q.patterns.iter().all(|p| {
            let (s, pr, o) = (resolve(&p.subject), resolve(&p.predicate), resolve(&p.object));
            match (s, pr) {
                (RdfTerm::Iri(s), RdfTerm::Iri(pr)) => triples.contains(&RdfTriple::new(s, pr, o)),
                _ => false,
            }
        });
        if all {
            out.insert(
                q.select
                    .iter()
                    .map(|v| value[vars.iter().position(|x| x == v).unwrap()].clone())
                    .collect(),
            );
        }
    }
    out
}

fn random_literal(r: &mut impl Rng) -> RdfTerm {
    match r.gen_range(0..5) {
        0 => RdfTerm::literal(r.gen_range(-500i64..5000).to_string(), Datatype::Integer),
        1 => RdfTerm::literal(format!("{}.{}", r.gen_range(0..999), r.gen_range(0..99)), Datatype::Decimal),
        2 => RdfTerm::literal(if r.gen_bool(0.5) { "true" } else { "false" }, Datatype::Boolean),
        3 => {
            let pool = ["spa", "a \"quoted\" word", "back\\slash", "line\nbreak", "café", "tab\there", ""];
            RdfTerm::literal(*pool.choose(r).unwrap(), Datatype::String)
        }
        _ => RdfTerm::Iri(iri(&format!("o{}", r.gen_range(0..20)))),
    }
}

/// Graph over escaped names, every literal type and awkward strings.
pub fn random_rich_graph(r: &mut impl Rng, max: usize) -> BTreeSet<RdfTriple> {
    let subjects = ["Marigold", "Blue_Lotus", "Caf%C3%A9", "h-1", "x"];
    let n = r.gen_range(0..=max);
    (0..n)
        .map(|_| {
            let s = iri(subjects.choose(r).unwrap());
            if r.gen_bool(0.2) {
                RdfTriple::new(s, RDF_TYPE, RdfTerm::Iri(iri("Hotel")))
            } else {
                let p = iri(&format!("p{}", r.gen_range(0..8)));
                RdfTriple::new(s, p, random_literal(r))
            }
        })
        .collect()
}
