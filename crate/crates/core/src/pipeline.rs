//! End-to-end extraction: documents in, populated graph and log out.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};

use crate::domain::{infer_domain, DomainDecision, DomainError, SemanticLexicon};
use crate::metrics::{corpus_report, score_document, CorpusSummary, DocumentReport, GoldAnnotation};
use crate::patterns::{Extraction, RuleSet};
use crate::store::{OntologyGraph, OntologySchema, StoreError, DEFAULT_BASE};
use crate::textprep::{analyze, parse_bracketed_tree, Analyzed, ParseTree, TagLexicon, TreeParseError};
use crate::theme::{collect_concepts, collect_subjects, identify_theme, max_occur_concepts, ThemeResult};
use crate::triplet::{extract_triple, Triple};
use crate::{map_items, Execution};

/// Loaded and cross-checked pipeline inputs.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub schema: OntologySchema,
    pub lexicons: Vec<SemanticLexicon>,
    pub rules: RuleSet,
    pub tag_lexicon: TagLexicon,
    pub base_iri: String,
    pub hint: Option<String>,
    pub execution: Execution,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}, tree {line}: {source}")]
    Tree {
        path: PathBuf,
        line: usize,
        source: TreeParseError,
    },
    #[error("lexicon `{domain}` names class `{class}`, which the schema does not declare")]
    LexiconClass { domain: String, class: String },
    #[error("lexicon `{0}` names no class")]
    LexiconWithoutClass(String),
    #[error(transparent)]
    Rules(#[from] crate::patterns::RuleError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("{doc}: {source}")]
    Store { doc: String, source: StoreError },
    #[error("graph invariant violated: {0}")]
    Invariant(String),
}

impl PipelineError {
    /// True for failures caused by the program rather than its input.
    pub fn is_internal(&self) -> bool {
        matches!(self, PipelineError::Invariant(_))
    }
}

impl PipelineConfig {
    /// Bundled hotel and hospital schema, lexicons and hotel rules.
    pub fn bundled() -> Self {
        let schema = OntologySchema::hotel()
            .merge(OntologySchema::hospital())
            .expect("bundled schemas are disjoint");
        PipelineConfig {
            schema,
            lexicons: vec![SemanticLexicon::hotel(), SemanticLexicon::hospital()],
            rules: RuleSet::hotel(),
            tag_lexicon: TagLexicon::bundled(),
            base_iri: DEFAULT_BASE.to_string(),
            hint: None,
            execution: Execution::default(),
        }
    }

    /// Rules and lexicon classes must agree with the schema.
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.rules.check_schema(&self.schema)?;
        for lex in &self.lexicons {
            let class = lex
                .classes
                .first()
                .ok_or_else(|| PipelineError::LexiconWithoutClass(lex.domain.clone()))?;
            if !self.schema.has_class(class) {
                return Err(PipelineError::LexiconClass {
                    domain: lex.domain.clone(),
                    class: class.clone(),
                });
            }
        }
        if let Some(h) = &self.hint {
            if !self.lexicons.iter().any(|l| l.domain.eq_ignore_ascii_case(h)) {
                return Err(DomainError::UnknownHint {
                    hint: h.clone(),
                    registered: self.lexicons.iter().map(|l| l.domain.clone()).collect(),
                }
                .into());
            }
        }
        Ok(())
    }

    fn class_of(&self, domain: &str) -> Option<&str> {
        self.lexicons
            .iter()
            .find(|l| l.domain == domain)
            .and_then(|l| l.classes.first())
            .map(String::as_str)
    }
}

/// One input text, optionally with bracketed parses (one per sentence).
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub name: String,
    pub text: String,
    pub trees: Option<Vec<ParseTree>>,
}

impl Document {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            name: name.into(),
            text: text.into(),
            trees: None,
        }
    }
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parse a `.trees` sidecar: one bracketed tree per non-blank line.
pub fn parse_tree_file(path: &Path, text: &str) -> Result<Vec<ParseTree>, PipelineError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            parse_bracketed_tree(l).map_err(|source| PipelineError::Tree {
                path: path.to_path_buf(),
                line: n + 1,
                source,
            })
        })
        .collect()
}

/// Load one `.txt` file and its `.trees` sidecar when present.
pub fn load_document(path: &Path) -> Result<Document, PipelineError> {
    let text = read(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let sidecar = path.with_extension("trees");
    let trees = if sidecar.is_file() {
        Some(parse_tree_file(&sidecar, &read(&sidecar)?)?)
    } else {
        None
    };
    Ok(Document { name, text, trees })
}

/// Files as given; directories contribute their `.txt` files. Sorted by name.
pub fn load_documents(paths: &[PathBuf]) -> Result<Vec<Document>, PipelineError> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|source| PipelineError::Io {
                path: p.clone(),
                source,
            })?;
            for e in entries {
                let e = e.map_err(|source| PipelineError::Io {
                    path: p.clone(),
                    source,
                })?;
                let path = e.path();
                if path.extension().is_some_and(|x| x == "txt") {
                    files.push(path);
                }
            }
        } else {
            files.push(p.clone());
        }
    }
    let mut docs = files.iter().map(|f| load_document(f)).collect::<Result<Vec<_>, _>>()?;
    docs.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(docs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    NoTheme,
    UndeterminedDomain,
    Empty,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::NoTheme => "no-theme",
            SkipReason::UndeterminedDomain => "undetermined-domain",
            SkipReason::Empty => "empty",
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything learned about one document before graph assembly.
#[derive(Debug, Clone)]
pub struct DocumentResult {
    pub name: String,
    pub sentences: Vec<Analyzed>,
    pub triples: Vec<Triple>,
    pub theme: ThemeResult,
    pub domain: DomainDecision,
    /// Domain the text alone points to, when a hint overrode it.
    pub overridden: Option<Option<String>>,
    pub extraction: Extraction,
    pub skip: Option<SkipReason>,
}

/// Preprocess, extract triples, and decide theme, domain and attributes.
pub fn process_document(config: &PipelineConfig, doc: &Document) -> Result<DocumentResult, PipelineError> {
    let sentences = analyze(&doc.text, &config.tag_lexicon, doc.trees.as_deref());
    let triples: Vec<Triple> = sentences
        .iter()
        .filter_map(|s| extract_triple(s.tree.as_ref()?, s.index))
        .collect();
    let tagged: Vec<_> = sentences.iter().map(|s| s.tagged.clone()).collect();
    let concepts = collect_concepts(&tagged);
    let theme = identify_theme(&concepts, &collect_subjects(&triples), &max_occur_concepts(&concepts));

    let all_tokens: Vec<_> = tagged.iter().flatten().cloned().collect();
    let inferred = infer_domain(&all_tokens, &config.lexicons, None)?;
    let (domain, overridden) = match &config.hint {
        Some(h) => {
            let hinted = infer_domain(&all_tokens, &config.lexicons, Some(h))?;
            let differs = hinted.domain != inferred.domain;
            (hinted, differs.then(|| inferred.domain.clone()))
        }
        None => (inferred, None),
    };

    let tokens: Vec<_> = tagged
        .iter()
        .map(|s| s.iter().map(|t| t.token.clone()).collect::<Vec<_>>())
        .collect();
    let extraction = config.rules.apply_document(&tokens);

    let skip = if all_tokens.is_empty() {
        Some(SkipReason::Empty)
    } else if domain.domain.is_none() {
        Some(SkipReason::UndeterminedDomain)
    } else if theme.theme.is_none() {
        Some(SkipReason::NoTheme)
    } else {
        None
    };
    Ok(DocumentResult {
        name: doc.name.clone(),
        sentences,
        triples,
        theme,
        domain,
        overridden,
        extraction,
        skip,
    })
}

/// Log line tied to a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub doc: String,
    pub message: String,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.doc, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct ExtractRun {
    pub graph: OntologyGraph,
    /// In document-name order.
    pub results: Vec<DocumentResult>,
    pub log: Vec<LogEntry>,
}

impl ExtractRun {
    pub fn skipped(&self) -> impl Iterator<Item = (&str, SkipReason)> {
        self.results
            .iter()
            .filter_map(|r| Some((r.name.as_str(), r.skip?)))
    }
}

/// Process `docs` (concurrently when configured) and assert one instance
/// per usable document. Graph assembly runs in document-name order.
pub fn run_extract(config: &PipelineConfig, docs: &[Document]) -> Result<ExtractRun, PipelineError> {
    let mut order: Vec<&Document> = docs.iter().collect();
    order.sort_by(|a, b| a.name.cmp(&b.name));
    let results = map_items(&order, config.execution, |d| process_document(config, d))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    let mut graph = OntologyGraph::new(config.schema.clone(), config.base_iri.clone());
    let mut log = Vec::new();
    let mut note = |doc: &str, message: String| {
        info!("{doc}: {message}");
        log.push(LogEntry {
            doc: doc.to_string(),
            message,
        });
    };
    if results.is_empty() {
        warn!("no input documents");
    }
    for r in &results {
        if let Some(inferred) = &r.overridden {
            note(
                &r.name,
                format!(
                    "hint `{}` overrides inferred domain `{}`",
                    r.domain.domain.as_deref().unwrap_or(""),
                    inferred.as_deref().unwrap_or("undetermined")
                ),
            );
        }
        for c in &r.extraction.conflicts {
            note(
                &r.name,
                format!("conflict {}: kept {} dropped {} ({})", c.attribute, c.kept, c.dropped, c.rule_id),
            );
        }
        if let Some(reason) = r.skip {
            note(&r.name, format!("skipped {reason}"));
            continue;
        }
        let domain = r.domain.domain.as_deref().expect("kept documents have a domain");
        let theme = r.theme.theme.as_deref().expect("kept documents have a theme");
        let class = config.class_of(domain).ok_or_else(|| PipelineError::LexiconWithoutClass(domain.to_string()))?;
        // attributes the class does not own are reported, not asserted
        let (own, foreign): (Vec<_>, Vec<_>) = r.extraction.values.iter().cloned().partition(|a| {
            config.schema.attribute(&a.attribute).is_some_and(|d| d.owner == class)
        });
        for a in &foreign {
            note(&r.name, format!("dropped {}: not an attribute of {class}", a.attribute));
        }
        let outcome = graph
            .assert_instance(class, theme, &own)
            .map_err(|source| PipelineError::Store {
                doc: r.name.clone(),
                source,
            })?;
        note(
            &r.name,
            format!("{} a {class} with {} attributes", outcome.instance, own.len()),
        );
        for rej in &outcome.rejected {
            note(
                &r.name,
                format!("rejected {}: already {} not {}", rej.attribute, rej.existing, rej.attempted),
            );
        }
    }
    graph.check_invariants().map_err(PipelineError::Invariant)?;
    Ok(ExtractRun { graph, results, log })
}

#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub run: ExtractRun,
    pub reports: Vec<DocumentReport>,
    pub summary: Option<CorpusSummary>,
    /// Problems that kept a gold document out of the report.
    pub errors: Vec<String>,
}

/// Extract `docs` and score them against `gold`, in gold order.
pub fn run_eval(config: &PipelineConfig, docs: &[Document], gold: &[GoldAnnotation]) -> Result<EvalOutcome, PipelineError> {
    let wanted: BTreeSet<&str> = gold.iter().map(|g| g.doc_id.as_str()).collect();
    let used: Vec<Document> = docs.iter().filter(|d| wanted.contains(d.name.as_str())).cloned().collect();
    let run = run_extract(config, &used)?;
    let by_name: BTreeMap<&str, &DocumentResult> = run.results.iter().map(|r| (r.name.as_str(), r)).collect();
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for g in gold {
        let Some(r) = by_name.get(g.doc_id.as_str()) else {
            errors.push(format!("{}: no input document", g.doc_id));
            continue;
        };
        let extracted = if r.skip.is_some() { &[][..] } else { &r.extraction.values[..] };
        match score_document(g, extracted, &r.domain, &r.theme) {
            Ok(rep) => reports.push(rep),
            Err(e) => errors.push(format!("{}: {e}", g.doc_id)),
        }
    }
    let summary = corpus_report(&reports).ok();
    Ok(EvalOutcome {
        run,
        reports,
        summary,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::serialize_turtle;

    const PASSAGE: &str = "Shantiniketan at Prince Street offers excellent accommodation for the guests. \
        Comprising of 6 blocks and 56 deluxe rooms, Shantiniketan offers a decent stay along with \
        delectable delights of the Princess Café.";

    #[test]
    fn worked_passage_becomes_an_instance() {
        let run = run_extract(&PipelineConfig::bundled(), &[Document::new("s", PASSAGE)]).unwrap();
        let ttl = serialize_turtle(&run.graph);
        assert!(ttl.contains(":Shantiniketan a :Hotel"), "{ttl}");
        assert!(ttl.contains(":facilities \"accommodation\"^^xsd:string"), "{ttl}");
        assert!(ttl.contains(":numrooms 56"), "{ttl}");
    }

    #[test]
    fn skipped_documents_are_logged() {
        let docs = [
            Document::new("a", "   "),
            Document::new("b", "It is raining today."),
        ];
        let run = run_extract(&PipelineConfig::bundled(), &docs).unwrap();
        assert!(run.graph.is_empty());
        let skipped: Vec<_> = run.skipped().collect();
        assert_eq!(skipped, [("a", SkipReason::Empty), ("b", SkipReason::UndeterminedDomain)]);
        assert!(run.log.iter().any(|l| l.message == "skipped empty"));
    }

    #[test]
    fn no_documents_gives_empty_graph() {
        let run = run_extract(&PipelineConfig::bundled(), &[]).unwrap();
        assert!(run.graph.is_empty());
    }

    #[test]
    fn hint_conflict_is_logged() {
        let config = PipelineConfig {
            hint: Some("hospital".into()),
            ..PipelineConfig::bundled()
        };
        let run = run_extract(&config, &[Document::new("s", PASSAGE)]).unwrap();
        assert!(run.log.iter().any(|l| l.message.contains("overrides inferred domain `hotel`")));
        assert!(serialize_turtle(&run.graph).contains(":Shantiniketan a :Hospital"));
    }

    #[test]
    fn unknown_hint_fails_validation() {
        let config = PipelineConfig {
            hint: Some("airport".into()),
            ..PipelineConfig::bundled()
        };
        assert!(matches!(config.validate(), Err(PipelineError::Domain(_))));
        assert!(PipelineConfig::bundled().validate().is_ok());
    }

    #[test]
    fn missing_gold_document_is_listed() {
        let gold = crate::metrics::parse_gold(
            "doc s\ndomain hotel\ntheme Shantiniketan\nattr numrooms 56\nattr facilities accommodation\n\
             doc gone\ndomain hotel\ntheme X\nattr numrooms 1\n",
        )
        .unwrap();
        let out = run_eval(&PipelineConfig::bundled(), &[Document::new("s", PASSAGE)], &gold).unwrap();
        assert_eq!(out.errors, ["gone: no input document"]);
        assert_eq!(out.summary.unwrap().macro_accuracy, 100.0);
    }
}
