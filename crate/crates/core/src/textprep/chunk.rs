use super::tagger::{Tag, TaggedToken};
use super::tree::ParseTree;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse an empty sentence")]
pub struct ChunkError;

/// Greedy deterministic chunker producing the S/NP/VP/PP/ADJP shapes the
/// triple extractors consume.
///
/// * maximal runs of DT/JJ/CD/noun tags form an NP, or an ADJP when the run
///   has no noun or number but does have an adjective;
/// * IN or TO directly followed by an NP forms a PP;
/// * the first verb opens a VP spanning the rest of the sentence, and every
///   later verb opens a nested VP spanning what follows it;
/// * material before the first verb becomes the subject NP (wrapped in an
///   outer NP when it holds several chunks);
/// * a sentence-initial participle (VBG/VBN) clause closed by a comma and
///   followed by a finite clause is kept as a nested S.
pub fn shallow_parse(tagged: &[TaggedToken]) -> Result<ParseTree, ChunkError> {
    if tagged.is_empty() {
        return Err(ChunkError);
    }
    Ok(ParseTree::node("S", clause(tagged)))
}

fn clause(toks: &[TaggedToken]) -> Vec<ParseTree> {
    if let Some(comma) = fronted_participle(toks) {
        let mut out = vec![
            ParseTree::node("S", vec![verb_phrase(&toks[..comma])]),
            pre(&toks[comma]),
        ];
        out.extend(clause(&toks[comma + 1..]));
        return out;
    }
    let Some(v) = toks.iter().position(|t| t.tag.is_verb()) else {
        return chunks(toks);
    };
    let mut subject = chunks(&toks[..v]);
    let has_np = subject.iter().any(|c| c.label == "NP");
    let mut out = if subject.len() > 1 && has_np {
        vec![ParseTree::node("NP", subject)]
    } else {
        std::mem::take(&mut subject)
    };
    out.push(verb_phrase(&toks[v..]));
    out
}

fn fronted_participle(toks: &[TaggedToken]) -> Option<usize> {
    if !matches!(toks.first()?.tag, Tag::VBG | Tag::VBN) {
        return None;
    }
    let comma = toks.iter().position(|t| t.token.surface == ",")?;
    toks[comma + 1..]
        .iter()
        .any(|t| t.tag.is_verb())
        .then_some(comma)
}

fn verb_phrase(toks: &[TaggedToken]) -> ParseTree {
    let mut children = vec![pre(&toks[0])];
    let rest = &toks[1..];
    match rest.iter().position(|t| t.tag.is_verb()) {
        Some(j) => {
            children.extend(chunks(&rest[..j]));
            children.push(verb_phrase(&rest[j..]));
        }
        None => children.extend(chunks(rest)),
    }
    ParseTree::node("VP", children)
}

fn in_np_run(tag: Tag) -> bool {
    tag.is_noun() || matches!(tag, Tag::DT | Tag::JJ | Tag::CD)
}

/// Verb-free chunking of a token span.
fn chunks(toks: &[TaggedToken]) -> Vec<ParseTree> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let tag = toks[i].tag;
        if in_np_run(tag) {
            let end = run_end(toks, i);
            out.push(nominal(&toks[i..end]));
            i = end;
        } else if matches!(tag, Tag::IN | Tag::TO)
            && toks.get(i + 1).is_some_and(|t| in_np_run(t.tag))
        {
            let end = run_end(toks, i + 1);
            let obj = nominal(&toks[i + 1..end]);
            if obj.label == "NP" {
                out.push(ParseTree::node("PP", vec![pre(&toks[i]), obj]));
            } else {
                out.push(pre(&toks[i]));
                out.push(obj);
            }
            i = end;
        } else {
            out.push(pre(&toks[i]));
            i += 1;
        }
    }
    out
}

fn run_end(toks: &[TaggedToken], from: usize) -> usize {
    toks[from..]
        .iter()
        .position(|t| !in_np_run(t.tag))
        .map_or(toks.len(), |p| from + p)
}

fn nominal(run: &[TaggedToken]) -> ParseTree {
    let nounish = run.iter().any(|t| t.tag.is_noun() || t.tag == Tag::CD);
    let adjectival = run.iter().any(|t| t.tag == Tag::JJ);
    let label = if !nounish && adjectival { "ADJP" } else { "NP" };
    ParseTree::node(label, run.iter().map(pre).collect())
}

fn pre(t: &TaggedToken) -> ParseTree {
    ParseTree::preterminal(t.tag.as_str(), t.token.surface.clone())
}
