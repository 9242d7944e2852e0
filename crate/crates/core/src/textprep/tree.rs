use std::collections::VecDeque;
use std::fmt;

/// Labeled constituency tree. A node carries either children or a leaf
/// word; nodes with a leaf are preterminals and their label is a POS tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
    pub leaf: Option<String>,
}

impl ParseTree {
    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        ParseTree {
            label: label.into(),
            children,
            leaf: None,
        }
    }

    pub fn preterminal(tag: impl Into<String>, word: impl Into<String>) -> Self {
        ParseTree {
            label: tag.into(),
            children: Vec::new(),
            leaf: Some(word.into()),
        }
    }

    pub fn is_preterminal(&self) -> bool {
        self.leaf.is_some()
    }

    /// Node/leaf exclusivity, checked recursively.
    pub fn is_well_formed(&self) -> bool {
        match &self.leaf {
            Some(w) => self.children.is_empty() && !w.is_empty() && !self.label.is_empty(),
            None => {
                !self.children.is_empty()
                    && !self.label.is_empty()
                    && self.children.iter().all(ParseTree::is_well_formed)
            }
        }
    }

    /// Leaf words, left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.leaf {
            Some(w) => out.push(w),
            None => self.children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Level-order traversal, children left to right, yielding each node
    /// with its depth (root = 0).
    pub fn bfs(&self) -> impl Iterator<Item = (&ParseTree, usize)> {
        let mut queue = VecDeque::from([(self, 0usize)]);
        std::iter::from_fn(move || {
            let (node, depth) = queue.pop_front()?;
            queue.extend(node.children.iter().map(|c| (c, depth + 1)));
            Some((node, depth))
        })
    }

    /// Pre-order traversal with depths.
    pub fn dfs(&self) -> impl Iterator<Item = (&ParseTree, usize)> {
        let mut stack = vec![(self, 0usize)];
        std::iter::from_fn(move || {
            let (node, depth) = stack.pop()?;
            stack.extend(node.children.iter().rev().map(|c| (c, depth + 1)));
            Some((node, depth))
        })
    }

    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for ParseTree {
    /// Penn bracketed form, e.g. `(NP (NNP Oberoi))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        match &self.leaf {
            Some(w) => write!(f, " {w}")?,
            None => {
                for c in &self.children {
                    write!(f, " {c}")?;
                }
            }
        }
        f.write_str(")")
    }
}
