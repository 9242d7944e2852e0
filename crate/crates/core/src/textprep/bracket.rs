use super::tree::ParseTree;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeParseError {
    #[error("unbalanced parentheses at column {0}")]
    Unbalanced(usize),
    #[error("empty constituent at column {0}")]
    Empty(usize),
    #[error("word `{word}` under non-preterminal at column {pos}")]
    StrayLeaf { word: String, pos: usize },
    #[error("unexpected `{found}` at column {pos}")]
    Unexpected { found: char, pos: usize },
}

/// Read one Penn-style bracketed tree. Error positions are 1-based
/// character columns. An unlabeled outer wrapper `( (S ...) )` is unwrapped.
pub fn parse_bracketed_tree(s: &str) -> Result<ParseTree, TreeParseError> {
    let mut p = Reader {
        chars: s.chars().collect(),
        pos: 0,
    };
    p.skip_ws();
    let tree = p.tree().map_err(to_column)?;
    p.skip_ws();
    if let Some(&c) = p.chars.get(p.pos) {
        return Err(to_column(if c == ')' {
            TreeParseError::Unbalanced(p.pos)
        } else {
            TreeParseError::Unexpected { found: c, pos: p.pos }
        }));
    }
    Ok(tree)
}

fn to_column(e: TreeParseError) -> TreeParseError {
    use TreeParseError::*;
    match e {
        Unbalanced(p) => Unbalanced(p + 1),
        Empty(p) => Empty(p + 1),
        StrayLeaf { word, pos } => StrayLeaf { word, pos: pos + 1 },
        Unexpected { found, pos } => Unexpected { found, pos: pos + 1 },
    }
}

struct Reader {
    chars: Vec<char>,
    pos: usize,
}

impl Reader {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> String {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|&c| !c.is_whitespace() && c != '(' && c != ')')
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn tree(&mut self) -> Result<ParseTree, TreeParseError> {
        let open = self.pos;
        match self.chars.get(self.pos) {
            Some('(') => self.pos += 1,
            Some(&c) => return Err(TreeParseError::Unexpected { found: c, pos: self.pos }),
            None => return Err(TreeParseError::Unbalanced(self.pos)),
        }
        self.skip_ws();
        let label = self.atom();
        let mut children = Vec::new();
        let mut word: Option<(String, usize)> = None;
        loop {
            self.skip_ws();
            match self.chars.get(self.pos) {
                None => return Err(TreeParseError::Unbalanced(self.pos)),
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                Some('(') => {
                    if let Some((w, pos)) = word.take() {
                        return Err(TreeParseError::StrayLeaf { word: w, pos });
                    }
                    children.push(self.tree()?);
                }
                Some(_) => {
                    let pos = self.pos;
                    let w = self.atom();
                    if word.is_some() || !children.is_empty() {
                        return Err(TreeParseError::StrayLeaf { word: w, pos });
                    }
                    word = Some((w, pos));
                }
            }
        }
        match (label.is_empty(), word, children.len()) {
            (_, None, 0) => Err(TreeParseError::Empty(open)),
            (true, None, 1) => Ok(children.pop().unwrap()),
            (true, _, _) => Err(TreeParseError::Empty(open)),
            (false, Some((w, _)), _) => Ok(ParseTree::preterminal(label, w)),
            (false, None, _) => Ok(ParseTree::node(label, children)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OBEROI: &str = "(S (NP (NNP Oberoi)) (VP (VBZ is) (VP (VBN located) (PP (IN in) (NP (NNP Bangalore))))))";

    #[test]
    fn minimal_tree() {
        let t = parse_bracketed_tree("(NP (NNP Oberoi))").unwrap();
        assert_eq!(t.label, "NP");
        assert_eq!(t.children, [ParseTree::preterminal("NNP", "Oberoi")]);
    }

    #[test]
    fn reference_parse() {
        let t = parse_bracketed_tree(OBEROI).unwrap();
        assert_eq!(t.leaves(), ["Oberoi", "is", "located", "in", "Bangalore"]);
        assert_eq!(t.to_string(), OBEROI);
        assert!(t.is_well_formed());
    }

    #[test]
    fn whitespace_and_wrapper() {
        let t = parse_bracketed_tree("( (S\n  (NP (NN spa))\n) )").unwrap();
        assert_eq!(t.to_string(), "(S (NP (NN spa)))");
    }

    #[test]
    fn errors() {
        assert_eq!(parse_bracketed_tree("(S (NP"), Err(TreeParseError::Unbalanced(7)));
        assert_eq!(parse_bracketed_tree("(S (NP) )"), Err(TreeParseError::Empty(4)));
        assert!(matches!(
            parse_bracketed_tree("(NP Oberoi (NNP x))"),
            Err(TreeParseError::StrayLeaf { pos: 5, .. })
        ));
        assert!(matches!(
            parse_bracketed_tree("(NP (NNP x) stray)"),
            Err(TreeParseError::StrayLeaf { .. })
        ));
        assert_eq!(parse_bracketed_tree("(NP (NN a)))"), Err(TreeParseError::Unbalanced(12)));
        assert_eq!(parse_bracketed_tree(""), Err(TreeParseError::Unbalanced(1)));
    }
}
