//! Extraction quality metrics and corpus reports.
//!
//! * ontology coverage: share of gold attributes that were extracted at all;
//! * attribute accuracy: share of extracted attributes whose value is right;
//! * domain and theme accuracy: 0 or 1 per document.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::domain::DomainDecision;
use crate::patterns::{normalize_value, AttributeValue, Normalized, Value};
use crate::theme::ThemeResult;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldAnnotation {
    pub doc_id: String,
    pub domain: String,
    pub theme: String,
    pub attributes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("gold annotation for `{0}` has no attributes")]
    EmptyGold(String),
    #[error("nothing was extracted")]
    NothingExtracted,
    #[error("no documents to report")]
    NoDocuments,
    #[error("gold line {line}: {message}")]
    Gold { line: usize, message: String },
}

/// Parse a gold file: blocks of `doc`, `domain`, `theme` and `attr` lines.
pub fn parse_gold(text: &str) -> Result<Vec<GoldAnnotation>, MetricError> {
    let mut out: Vec<GoldAnnotation> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let (key, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        let err = |message: &str| MetricError::Gold {
            line,
            message: message.to_string(),
        };
        if key == "doc" {
            if rest.is_empty() {
                return Err(err("`doc` needs an id"));
            }
            if out.iter().any(|g| g.doc_id == rest) {
                return Err(err("duplicate document id"));
            }
            out.push(GoldAnnotation {
                doc_id: rest.to_string(),
                domain: String::new(),
                theme: String::new(),
                attributes: BTreeMap::new(),
            });
            continue;
        }
        let current = out.last_mut().ok_or_else(|| err("expected `doc <id>` first"))?;
        match key {
            "domain" => current.domain = rest.to_string(),
            "theme" => current.theme = rest.to_string(),
            "attr" => {
                let (name, value) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err("`attr` needs a name and a value"))?;
                current
                    .attributes
                    .insert(name.to_string(), value.trim().to_string());
            }
            other => return Err(err(&format!("unknown key `{other}`"))),
        }
    }
    Ok(out)
}

/// |extracted ∩ gold| / |gold|, over attribute names.
pub fn ontology_coverage<'a>(
    extracted: impl IntoIterator<Item = &'a str>,
    gold: &GoldAnnotation,
) -> Result<f64, MetricError> {
    if gold.attributes.is_empty() {
        return Err(MetricError::EmptyGold(gold.doc_id.clone()));
    }
    let names: BTreeSet<&str> = extracted.into_iter().collect();
    let hit = gold
        .attributes
        .keys()
        .filter(|k| names.contains(k.as_str()))
        .count();
    Ok(hit as f64 / gold.attributes.len() as f64)
}

/// Numbers compare numerically, everything else as trimmed case-insensitive text.
pub fn value_matches(extracted: &Value, expected: &str) -> bool {
    let expected_num = match normalize_value(expected) {
        Normalized::Number { value, .. } => Some(value),
        Normalized::Text(_) => None,
    };
    match (extracted, expected_num) {
        (Value::Number(x), Some(y)) => (x - y).abs() <= 1e-9 * y.abs().max(1.0),
        (Value::Number(_), None) => false,
        (Value::Text(t), Some(y)) => match normalize_value(t) {
            Normalized::Number { value, .. } => (value - y).abs() <= 1e-9 * y.abs().max(1.0),
            Normalized::Text(_) => false,
        },
        (Value::Text(t), None) => t.trim().eq_ignore_ascii_case(expected.trim()),
    }
}

/// Number of extracted attributes that are correct.
pub fn count_correct(extracted: &[AttributeValue], gold: &GoldAnnotation) -> usize {
    extracted
        .iter()
        .filter(|a| {
            gold.attributes
                .get(&a.attribute)
                .is_some_and(|v| value_matches(&a.value, v))
        })
        .count()
}

pub fn attribute_accuracy(extracted: &[AttributeValue], gold: &GoldAnnotation) -> Result<f64, MetricError> {
    if extracted.is_empty() {
        return Err(MetricError::NothingExtracted);
    }
    Ok(count_correct(extracted, gold) as f64 / extracted.len() as f64)
}

pub fn semantic_domain_accuracy(decided: &DomainDecision, gold: &GoldAnnotation) -> u8 {
    u8::from(
        decided
            .domain
            .as_deref()
            .is_some_and(|d| d.eq_ignore_ascii_case(gold.domain.trim())),
    )
}

pub fn theme_concept_accuracy(result: &ThemeResult, gold: &GoldAnnotation) -> u8 {
    u8::from(
        result
            .theme
            .as_deref()
            .is_some_and(|t| t.trim().to_lowercase() == gold.theme.trim().to_lowercase()),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentReport {
    pub doc_id: String,
    pub total_retrieved: usize,
    pub correctly_retrieved: usize,
    pub incorrectly_retrieved: usize,
    pub coverage: f64,
    /// `None` when nothing was retrieved.
    pub attribute_accuracy: Option<f64>,
    pub domain_correct: bool,
    pub theme_correct: bool,
}

impl DocumentReport {
    /// Report from raw counts; other fields take neutral values.
    pub fn from_counts(doc_id: impl Into<String>, total: usize, correct: usize) -> Self {
        assert!(correct <= total, "correct count exceeds total");
        DocumentReport {
            doc_id: doc_id.into(),
            total_retrieved: total,
            correctly_retrieved: correct,
            incorrectly_retrieved: total - correct,
            coverage: 1.0,
            attribute_accuracy: (total > 0).then(|| correct as f64 / total as f64),
            domain_correct: true,
            theme_correct: true,
        }
    }

    /// Accuracy as a percentage; a document with nothing retrieved scores 0.
    pub fn accuracy_percent(&self) -> f64 {
        self.attribute_accuracy.unwrap_or(0.0) * 100.0
    }
}

/// Score one document against its gold annotation.
pub fn score_document(
    gold: &GoldAnnotation,
    extracted: &[AttributeValue],
    domain: &DomainDecision,
    theme: &ThemeResult,
) -> Result<DocumentReport, MetricError> {
    let correct = count_correct(extracted, gold);
    Ok(DocumentReport {
        doc_id: gold.doc_id.clone(),
        total_retrieved: extracted.len(),
        correctly_retrieved: correct,
        incorrectly_retrieved: extracted.len() - correct,
        coverage: ontology_coverage(extracted.iter().map(|a| a.attribute.as_str()), gold)?,
        attribute_accuracy: attribute_accuracy(extracted, gold).ok(),
        domain_correct: semantic_domain_accuracy(domain, gold) == 1,
        theme_correct: theme_concept_accuracy(theme, gold) == 1,
    })
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSummary {
    pub rows: Vec<DocumentReport>,
    /// Unweighted mean of per-document accuracy percentages, 2 decimals.
    pub macro_accuracy: f64,
    /// Same mean before rounding.
    pub macro_accuracy_exact: f64,
    pub mean_coverage: f64,
    pub domain_accuracy: f64,
    pub theme_accuracy: f64,
}

pub fn corpus_report(reports: &[DocumentReport]) -> Result<CorpusSummary, MetricError> {
    if reports.is_empty() {
        return Err(MetricError::NoDocuments);
    }
    let n = reports.len() as f64;
    let mean = |f: &dyn Fn(&DocumentReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let exact = mean(&|r| r.accuracy_percent());
    Ok(CorpusSummary {
        rows: reports.to_vec(),
        macro_accuracy: round2(exact),
        macro_accuracy_exact: exact,
        mean_coverage: mean(&|r| r.coverage),
        domain_accuracy: mean(&|r| f64::from(u8::from(r.domain_correct))),
        theme_accuracy: mean(&|r| f64::from(u8::from(r.theme_correct))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Tsv,
}

impl CorpusSummary {
    /// Note when a separately printed average disagrees with the
    /// recomputed one at two decimals.
    pub fn discrepancy(&self, printed: f64) -> Option<String> {
        let diff = round2(self.macro_accuracy - printed);
        (diff != 0.0).then(|| {
            format!(
                "recomputed average {:.2} (exact {:.4}) differs from printed {:.2} by {:+.2}",
                self.macro_accuracy, self.macro_accuracy_exact, printed, diff
            )
        })
    }

    pub fn render(&self, format: ReportFormat) -> String {
        let header = [
            "Sl.No",
            "Document",
            "Total Retrieved",
            "Correctly Retrieved",
            "Incorrectly Retrieved",
            "Extraction Accuracy",
            "Coverage",
            "Domain",
            "Theme",
        ];
        let rows: Vec<[String; 9]> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                [
                    (i + 1).to_string(),
                    r.doc_id.clone(),
                    r.total_retrieved.to_string(),
                    r.correctly_retrieved.to_string(),
                    r.incorrectly_retrieved.to_string(),
                    format!("{:.2}", r.accuracy_percent()),
                    format!("{:.2}", r.coverage * 100.0),
                    u8::from(r.domain_correct).to_string(),
                    u8::from(r.theme_correct).to_string(),
                ]
            })
            .collect();
        let mut out = String::new();
        match format {
            ReportFormat::Tsv => {
                out.push_str(&header.join("\t"));
                out.push('\n');
                for r in &rows {
                    out.push_str(&r.join("\t"));
                    out.push('\n');
                }
                writeln!(out, "#average\t{:.2}", self.macro_accuracy).unwrap();
            }
            ReportFormat::Text => {
                let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
                for r in &rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |cells: Vec<&str>| {
                    cells
                        .iter()
                        .zip(&widths)
                        .enumerate()
                        .map(|(i, (c, &w))| {
                            if i == 1 {
                                format!("{c:<w$}")
                            } else {
                                format!("{c:>w$}")
                            }
                        })
                        .collect::<Vec<_>>()
                        .join("  ")
                };
                writeln!(out, "{}", line(header.to_vec())).unwrap();
                for r in &rows {
                    writeln!(out, "{}", line(r.iter().map(String::as_str).collect())).unwrap();
                }
                writeln!(out).unwrap();
                writeln!(out, "Accuracy (Average) = {:.2}%", self.macro_accuracy).unwrap();
                writeln!(out, "Coverage (Average) = {:.2}%", self.mean_coverage * 100.0).unwrap();
                writeln!(out, "Semantic Domain Accuracy = {:.2}%", self.domain_accuracy * 100.0).unwrap();
                writeln!(out, "Theme Concept Accuracy = {:.2}%", self.theme_accuracy * 100.0).unwrap();
            }
        }
        out
    }
}
