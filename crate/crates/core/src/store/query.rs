//! Basic-graph-pattern SELECT queries, evaluated by nested-loop join.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::graph::{Datatype, RdfTerm, RdfTriple, RDF_TYPE};
use super::lex::{lex, Spanned, Tok};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(String),
    Term(RdfTerm),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub select: Vec<String>,
    pub patterns: Vec<TriplePattern>,
    pub prefixes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("query line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("selected variable ?{0} does not occur in WHERE")]
    UnboundVariable(String),
    #[error("WHERE clause has no triple patterns")]
    EmptyPattern,
}

/// Parse `PREFIX p: <iri>` lines followed by
/// `SELECT ?v.. WHERE { tp (. tp)* }`. `defaults` seeds the prefix table;
/// prefixes declared in the text override it.
pub fn parse_query(text: &str, defaults: &BTreeMap<String, String>) -> Result<Query, QueryError> {
    let toks = lex(text).map_err(|e| QueryError::Syntax {
        line: e.line,
        col: e.col,
        message: e.message,
    })?;
    let mut p = QParser {
        toks,
        pos: 0,
        end: end_position(text),
        prefixes: defaults.clone(),
    };
    p.query()
}

fn end_position(text: &str) -> (usize, usize) {
    let line = text.split('\n').count();
    let col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

struct QParser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
    prefixes: BTreeMap<String, String>,
}

impl QParser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, QueryError> {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.col));
        Err(QueryError::Syntax {
            line,
            col,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn keyword(&mut self, kw: &str) -> bool {
        match self.peek() {
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw) => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        while self.keyword("PREFIX") {
            let name = match self.peek() {
                Some(Tok::PName { prefix, local }) if local.is_empty() => prefix.clone(),
                _ => return self.err("expected prefix name"),
            };
            self.pos += 1;
            let iri = match self.peek() {
                Some(Tok::Iri(i)) => i.clone(),
                _ => return self.err("expected IRI"),
            };
            self.pos += 1;
            self.prefixes.insert(name, iri);
        }
        if !self.keyword("SELECT") {
            return self.err("expected SELECT");
        }
        let mut select = Vec::new();
        let mut star = false;
        loop {
            match self.peek() {
                Some(Tok::Var(v)) => {
                    if !select.contains(v) {
                        select.push(v.clone());
                    }
                    self.pos += 1;
                }
                Some(Tok::Punct('*')) if select.is_empty() && !star => {
                    star = true;
                    self.pos += 1;
                }
                _ => break,
            }
        }
        if select.is_empty() && !star {
            return self.err("expected at least one variable");
        }
        if !self.keyword("WHERE") {
            return self.err("expected WHERE");
        }
        if self.peek() != Some(&Tok::Punct('{')) {
            return self.err("expected `{`");
        }
        self.pos += 1;
        let mut patterns = Vec::new();
        loop {
            if self.peek() == Some(&Tok::Punct('}')) {
                self.pos += 1;
                break;
            }
            patterns.push(TriplePattern {
                subject: self.term(false)?,
                predicate: self.term(true)?,
                object: self.term(false)?,
            });
            match self.peek() {
                Some(Tok::Punct('.')) => self.pos += 1,
                Some(Tok::Punct('}')) => {}
                _ => return self.err("expected `.` or `}`"),
            }
        }
        if self.pos < self.toks.len() {
            return self.err("unexpected input after `}`");
        }
        if patterns.is_empty() {
            return Err(QueryError::EmptyPattern);
        }
        let vars = pattern_vars(&patterns);
        if star {
            select = vars;
        } else if let Some(v) = select.iter().find(|v| !vars.contains(v)) {
            return Err(QueryError::UnboundVariable(v.clone()));
        }
        Ok(Query {
            select,
            patterns,
            prefixes: self.prefixes.clone(),
        })
    }

    fn term(&mut self, predicate: bool) -> Result<PatternTerm, QueryError> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of query");
        };
        let term = match tok {
            Tok::Var(v) => PatternTerm::Var(v),
            Tok::Word(w) if predicate && w == "a" => PatternTerm::Term(RdfTerm::iri(RDF_TYPE)),
            Tok::Word(w) if w == "true" || w == "false" => {
                PatternTerm::Term(RdfTerm::literal(w, Datatype::Boolean))
            }
            Tok::Iri(i) => PatternTerm::Term(RdfTerm::Iri(i)),
            Tok::PName { prefix, local } => match self.prefixes.get(&prefix) {
                Some(ns) => PatternTerm::Term(RdfTerm::Iri(format!("{ns}{local}"))),
                None => return self.err(format!("undeclared prefix `{prefix}:`")),
            },
            Tok::Number(n) => {
                let dt = if n.contains('.') { Datatype::Decimal } else { Datatype::Integer };
                PatternTerm::Term(RdfTerm::literal(n, dt))
            }
            Tok::Str(s) => {
                self.pos += 1;
                let dt = if self.peek() == Some(&Tok::DoubleCaret) {
                    self.pos += 1;
                    let iri = match self.peek().cloned() {
                        Some(Tok::Iri(i)) => i,
                        Some(Tok::PName { prefix, local }) => match self.prefixes.get(&prefix) {
                            Some(ns) => format!("{ns}{local}"),
                            None => return self.err(format!("undeclared prefix `{prefix}:`")),
                        },
                        _ => return self.err("expected datatype IRI"),
                    };
                    match Datatype::from_iri(&iri) {
                        Some(d) => {
                            self.pos += 1;
                            d
                        }
                        None => return self.err(format!("unsupported datatype <{iri}>")),
                    }
                } else {
                    Datatype::String
                };
                return Ok(PatternTerm::Term(RdfTerm::literal(s, dt)));
            }
            _ => return self.err("expected variable, IRI or literal"),
        };
        self.pos += 1;
        Ok(term)
    }
}

/// Variables in order of first appearance.
fn pattern_vars(patterns: &[TriplePattern]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in patterns {
        for t in p.positions() {
            if let PatternTerm::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
    }
    out
}

/// Query answers: distinct rows, sorted lexicographically by their
/// rendered bindings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultTable {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<RdfTerm>>,
}

impl ResultTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Tab-separated rendering with IRIs compacted through `prefixes`.
    pub fn render(&self, prefixes: &BTreeMap<String, String>) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.vars.iter().map(|v| format!("?{v}")).collect();
        out.push_str(&header.join("\t"));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|t| compact(t, prefixes)).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

fn compact(t: &RdfTerm, prefixes: &BTreeMap<String, String>) -> String {
    match t {
        RdfTerm::Iri(i) => prefixes
            .iter()
            .filter(|(_, ns)| !ns.is_empty() && i.starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.len())
            .map(|(p, ns)| format!("{p}:{}", &i[ns.len()..]))
            .unwrap_or_else(|| t.to_string()),
        RdfTerm::Literal { lexical, .. } => lexical.clone(),
    }
}

impl fmt::Display for ResultTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&BTreeMap::new()))
    }
}

/// Graph triple seen as three terms.
fn as_terms(t: &RdfTriple) -> [RdfTerm; 3] {
    [
        RdfTerm::Iri(t.subject.clone()),
        RdfTerm::Iri(t.predicate.clone()),
        t.object.clone(),
    ]
}

/// Evaluate `q` against `triples`: every assignment of the pattern
/// variables under which all patterns are in the graph, projected on the
/// selected variables.
pub fn execute_query<'a>(
    triples: impl IntoIterator<Item = &'a RdfTriple>,
    q: &Query,
) -> ResultTable {
    let data: Vec<[RdfTerm; 3]> = triples.into_iter().map(as_terms).collect();
    let vars = pattern_vars(&q.patterns);
    let slot = |v: &str| vars.iter().position(|x| x == v).unwrap();

    let mut partial: Vec<Vec<Option<RdfTerm>>> = vec![vec![None; vars.len()]];
    for pattern in &q.patterns {
        let mut next = Vec::new();
        for binding in &partial {
            'triple: for t in &data {
                let mut extended = binding.clone();
                for (pos, term) in pattern.positions().into_iter().enumerate() {
                    match term {
                        PatternTerm::Term(c) => {
                            if *c != t[pos] {
                                continue 'triple;
                            }
                        }
                        PatternTerm::Var(v) => {
                            let s = slot(v);
                            match &extended[s] {
                                Some(bound) if *bound != t[pos] => continue 'triple,
                                Some(_) => {}
                                None => extended[s] = Some(t[pos].clone()),
                            }
                        }
                    }
                }
                next.push(extended);
            }
        }
        partial = next;
        if partial.is_empty() {
            break;
        }
    }

    let select: Vec<usize> = q.select.iter().map(|v| slot(v)).collect();
    let rows: BTreeSet<Vec<RdfTerm>> = partial
        .into_iter()
        .map(|b| select.iter().map(|&s| b[s].clone().expect("all pattern vars bound")).collect())
        .collect();
    let mut rows: Vec<Vec<RdfTerm>> = rows.into_iter().collect();
    rows.sort_by_cached_key(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>());
    ResultTable {
        vars: q.select.clone(),
        rows,
    }
}
