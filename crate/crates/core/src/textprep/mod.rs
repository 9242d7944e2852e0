//! Text preprocessing: sentence splitting, tokenization, POS tagging and
//! constituency trees (bracketed ingestion or a greedy shallow chunker).

mod bracket;
mod chunk;
pub(crate) mod tagger;
mod token;
mod tree;

pub use bracket::{parse_bracketed_tree, TreeParseError};
pub use chunk::{shallow_parse, ChunkError};
pub use tagger::{pos_tag, Tag, TagLexicon, TagLexiconError, TaggedToken};
pub use token::{split_sentences, tokenize, Sentence, Token};
pub use tree::ParseTree;

/// A sentence carried through every preprocessing stage.
#[derive(Debug, Clone)]
pub struct Analyzed {
    pub index: usize,
    pub text: String,
    pub tagged: Vec<TaggedToken>,
    pub tree: Option<ParseTree>,
}

/// Split, tokenize and tag `text`; build a tree per sentence, preferring the
/// supplied bracketed parses (one per sentence) over the shallow chunker.
pub fn analyze(
    text: &str,
    lex: &TagLexicon,
    trees: Option<&[ParseTree]>,
) -> Vec<Analyzed> {
    split_sentences(text)
        .into_iter()
        .enumerate()
        .map(|(index, s)| {
            let tokens = tokenize(&s.text);
            let tagged = pos_tag(&tokens, lex);
            let tree = match trees.and_then(|t| t.get(index)) {
                Some(t) => Some(t.clone()),
                None => shallow_parse(&tagged).ok(),
            };
            Analyzed {
                index,
                text: s.text,
                tagged,
                tree,
            }
        })
        .collect()
}
