use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::graph::{escape_string, Datatype, OntologyGraph, RdfTerm, RdfTriple, RDF_NS, RDF_TYPE, XSD_NS};
use super::lex::{lex, Spanned, Tok};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("turtle line {line}, column {col}: {message}")]
pub struct TurtleError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Parsed Turtle: the prefix table and the triple set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TurtleDoc {
    pub prefixes: BTreeMap<String, String>,
    pub triples: BTreeSet<RdfTriple>,
}

pub fn serialize_turtle(g: &OntologyGraph) -> String {
    write_turtle(&g.base_iri, g.triples())
}

/// Deterministic Turtle: sorted prefixes, subjects in lexicographic order,
/// `a` first and then predicates in order, objects sorted.
pub fn write_turtle<'a>(base: &str, triples: impl IntoIterator<Item = &'a RdfTriple>) -> String {
    let prefixes: BTreeMap<&str, &str> =
        BTreeMap::from([("", base), ("rdf", RDF_NS), ("xsd", XSD_NS)]);
    let mut out = String::new();
    for (p, iri) in &prefixes {
        writeln!(out, "@prefix {p}: <{iri}> .").unwrap();
    }

    let mut by_subject: BTreeMap<&str, BTreeMap<(bool, &str), BTreeSet<&RdfTerm>>> = BTreeMap::new();
    for t in triples {
        by_subject
            .entry(&t.subject)
            .or_default()
            .entry((t.predicate != RDF_TYPE, &t.predicate))
            .or_default()
            .insert(&t.object);
    }
    for (subject, preds) in by_subject {
        out.push('\n');
        out.push_str(&iri_token(subject, base));
        let n = preds.len();
        for (k, ((_, pred), objects)) in preds.into_iter().enumerate() {
            out.push_str(if k == 0 { " " } else { "    " });
            if pred == RDF_TYPE {
                out.push('a');
            } else {
                out.push_str(&iri_token(pred, base));
            }
            let objs: Vec<String> = objects.into_iter().map(|o| term_token(o, base)).collect();
            write!(out, " {}", objs.join(" , ")).unwrap();
            out.push_str(if k + 1 == n { " .\n" } else { " ;\n" });
        }
    }
    out
}

fn is_local_name(s: &str) -> bool {
    let b = s.as_bytes();
    if b.is_empty() || b[0] == b'-' {
        return false;
    }
    let mut i = 0;
    while i < b.len() {
        match b[i] {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'_' | b'-' => i += 1,
            b'%' if b.get(i + 1).is_some_and(u8::is_ascii_hexdigit)
                && b.get(i + 2).is_some_and(u8::is_ascii_hexdigit) =>
            {
                i += 3
            }
            _ => return false,
        }
    }
    true
}

fn is_integer_lexical(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn iri_token(iri: &str, base: &str) -> String {
    for (prefix, ns) in [("", base), ("xsd", XSD_NS), ("rdf", RDF_NS)] {
        if let Some(local) = iri.strip_prefix(ns) {
            if !ns.is_empty() && is_local_name(local) {
                return format!("{prefix}:{local}");
            }
        }
    }
    format!("<{iri}>")
}

fn term_token(t: &RdfTerm, base: &str) -> String {
    match t {
        RdfTerm::Iri(i) => iri_token(i, base),
        RdfTerm::Literal { lexical, datatype } => {
            if *datatype == Datatype::Integer && is_integer_lexical(lexical) {
                lexical.clone()
            } else {
                format!("\"{}\"^^xsd:{}", escape_string(lexical), datatype.local_name())
            }
        }
    }
}

pub fn parse_turtle(text: &str) -> Result<TurtleDoc, TurtleError> {
    let toks = lex(text).map_err(|e| TurtleError {
        line: e.line,
        col: e.col,
        message: e.message,
    })?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_line: text.lines().count().max(1),
        doc: TurtleDoc::default(),
    };
    while p.pos < p.toks.len() {
        p.statement()?;
    }
    Ok(p.doc)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    doc: TurtleDoc,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, TurtleError> {
        let (line, col) = match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => (self.end_line, 1),
        };
        Err(TurtleError {
            line,
            col,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect_punct(&mut self, c: char) -> Result<(), TurtleError> {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn statement(&mut self) -> Result<(), TurtleError> {
        match self.peek() {
            Some(Tok::At(d)) if d == "prefix" => {
                self.pos += 1;
                self.prefix_decl()?;
                self.expect_punct('.')
            }
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("prefix") => {
                self.pos += 1;
                self.prefix_decl()
            }
            Some(Tok::At(d)) => {
                let d = d.clone();
                self.err(format!("unsupported directive @{d}"))
            }
            _ => self.triples(),
        }
    }

    fn prefix_decl(&mut self) -> Result<(), TurtleError> {
        let name = match self.next() {
            Some(Tok::PName { prefix, local }) if local.is_empty() => prefix,
            _ => {
                self.pos -= 1;
                return self.err("expected prefix name");
            }
        };
        match self.next() {
            Some(Tok::Iri(iri)) => {
                self.doc.prefixes.insert(name, iri);
                Ok(())
            }
            _ => {
                self.pos -= 1;
                self.err("expected IRI")
            }
        }
    }

    fn iri(&mut self) -> Result<String, TurtleError> {
        match self.next() {
            Some(Tok::Iri(i)) => Ok(i),
            Some(Tok::PName { prefix, local }) => match self.doc.prefixes.get(&prefix) {
                Some(ns) => Ok(format!("{ns}{local}")),
                None => {
                    self.pos -= 1;
                    self.err(format!("undeclared prefix `{prefix}:`"))
                }
            },
            _ => {
                self.pos -= 1;
                self.err("expected IRI")
            }
        }
    }

    fn triples(&mut self) -> Result<(), TurtleError> {
        let subject = self.iri()?;
        loop {
            let predicate = if self.peek() == Some(&Tok::Word("a".into())) {
                self.pos += 1;
                RDF_TYPE.to_string()
            } else {
                self.iri()?
            };
            loop {
                let object = self.object()?;
                self.doc
                    .triples
                    .insert(RdfTriple::new(subject.clone(), predicate.clone(), object));
                if self.peek() == Some(&Tok::Punct(',')) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            match self.peek() {
                Some(Tok::Punct(';')) => {
                    self.pos += 1;
                    // trailing `;` before `.` is allowed
                    if self.peek() == Some(&Tok::Punct('.')) {
                        self.pos += 1;
                        return Ok(());
                    }
                }
                Some(Tok::Punct('.')) => {
                    self.pos += 1;
                    return Ok(());
                }
                _ => return self.err("expected `;`, `,` or `.`"),
            }
        }
    }

    fn object(&mut self) -> Result<RdfTerm, TurtleError> {
        match self.peek().cloned() {
            Some(Tok::Str(s)) => {
                self.pos += 1;
                let datatype = if self.peek() == Some(&Tok::DoubleCaret) {
                    self.pos += 1;
                    let iri = self.iri()?;
                    match Datatype::from_iri(&iri) {
                        Some(d) => d,
                        None => {
                            self.pos -= 1;
                            return self.err(format!("unsupported datatype <{iri}>"));
                        }
                    }
                } else if let Some(Tok::At(_)) = self.peek() {
                    return self.err("language tags are not supported");
                } else {
                    Datatype::String
                };
                Ok(RdfTerm::literal(s, datatype))
            }
            Some(Tok::Number(n)) => {
                self.pos += 1;
                let dt = if n.contains('.') { Datatype::Decimal } else { Datatype::Integer };
                Ok(RdfTerm::literal(n, dt))
            }
            Some(Tok::Word(w)) if w == "true" || w == "false" => {
                self.pos += 1;
                Ok(RdfTerm::literal(w, Datatype::Boolean))
            }
            Some(Tok::Iri(_)) | Some(Tok::PName { .. }) => Ok(RdfTerm::Iri(self.iri()?)),
            None => self.err("missing object"),
            _ => self.err("expected object"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{AttributeValue, Value};
    use crate::store::OntologySchema;

    const BASE: &str = "http://example.org/obie#";

    fn shantiniketan() -> OntologyGraph {
        let mut g = OntologyGraph::new(OntologySchema::hotel(), BASE);
        let av = |a: &str, v: Value| AttributeValue {
            attribute: a.into(),
            raw: String::new(),
            value: v,
            unit: None,
            rule_id: "t".into(),
        };
        g.assert_instance(
            "Hotel",
            "Shantiniketan",
            &[
                av("facilities", Value::Text("accomodation".into())),
                av("numrooms", Value::Number(56.0)),
            ],
        )
        .unwrap();
        g
    }

    #[test]
    fn shantiniketan_output() {
        let text = serialize_turtle(&shantiniketan());
        assert!(text.contains(":Shantiniketan a :Hotel"), "{text}");
        assert!(text.contains(":numrooms 56"), "{text}");
        assert_eq!(
            text,
            "@prefix : <http://example.org/obie#> .\n\
             @prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n\
             @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n\
             \n\
             :Shantiniketan a :Hotel ;\n    \
             :facilities \"accomodation\"^^xsd:string ;\n    \
             :numrooms 56 .\n"
        );
        let back = parse_turtle(&text).unwrap();
        assert_eq!(&back.triples, shantiniketan().triple_set());
    }

    #[test]
    fn empty_graph_is_header_only() {
        let g = OntologyGraph::new(OntologySchema::hotel(), BASE);
        let text = serialize_turtle(&g);
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().all(|l| l.starts_with("@prefix")));
        assert!(parse_turtle(&text).unwrap().triples.is_empty());
    }

    #[test]
    fn parse_errors() {
        let e = parse_turtle("@prefix : <http://x/> .\n:x :y").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("object"), "{e}");
        assert!(parse_turtle("").unwrap().triples.is_empty());
        assert!(parse_turtle("p:x p:y p:z .").is_err());
        assert!(parse_turtle("<a> <b> \"x\"@en .").is_err());
    }

    #[test]
    fn accepts_plain_forms() {
        let doc = parse_turtle(
            "PREFIX ex: <http://x/>\nex:a ex:b \"s\", 1.5 , true ;\n ex:c ex:d ; .",
        )
        .unwrap();
        assert_eq!(doc.triples.len(), 4);
        assert!(doc.triples.contains(&RdfTriple::new(
            "http://x/a",
            "http://x/b",
            RdfTerm::literal("1.5", Datatype::Decimal)
        )));
    }

    #[test]
    fn odd_iris_fall_back_to_brackets() {
        assert_eq!(iri_token("http://example.org/obie#a.b", BASE), "<http://example.org/obie#a.b>");
        assert_eq!(iri_token("http://example.org/obie#Caf%C3%A9", BASE), ":Caf%C3%A9");
        assert_eq!(iri_token("http://other/x", BASE), "<http://other/x>");
    }
}
