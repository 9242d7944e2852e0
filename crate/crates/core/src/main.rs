use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use obie::domain::{derive_lexicon, infer_domain, parse_lexicon, SemanticLexicon};
use obie::metrics::{parse_gold, ReportFormat};
use obie::patterns::{parse_rules, RuleSet};
use obie::pipeline::{load_documents, parse_tree_file, process_document, run_eval, run_extract, Document, PipelineConfig};
use obie::store::{
    default_prefixes, execute_query, load_schema, parse_query, parse_turtle, serialize_turtle, OntologySchema,
    DEFAULT_BASE,
};
use obie::textprep::TagLexicon;
use obie::Execution;

#[derive(Parser)]
#[command(name = "obie", version, about = "Extract ontology instances from hotel descriptions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Schema file; repeat to merge several. Defaults to the bundled hotel and hospital schemas.
    #[arg(long, global = true)]
    schema: Vec<PathBuf>,
    /// Rule file. Defaults to the bundled hotel rules.
    #[arg(long, global = true)]
    rules: Option<PathBuf>,
    /// Semantic lexicon files. Defaults to the bundled hotel and hospital lexicons.
    #[arg(long, global = true, num_args = 1.., value_delimiter = ',')]
    lexicons: Vec<PathBuf>,
    /// Word/tag lexicon for the tagger.
    #[arg(long, global = true)]
    tag_lexicon: Option<PathBuf>,
    #[arg(long, global = true, default_value = DEFAULT_BASE)]
    base_iri: String,
    /// Domain to use regardless of the text.
    #[arg(long, global = true)]
    hint: Option<String>,
    /// Maximum tokens between a medium rule's term and its number.
    #[arg(long, global = true)]
    gap: Option<usize>,
    /// Maximum tokens a `[text]` placeholder absorbs.
    #[arg(long, global = true)]
    text_gap: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Process documents one at a time.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Populate a graph from documents and write it as Turtle.
    Extract {
        /// Text files or directories of `.txt` files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the triples of one document (`-` reads stdin).
    Triples {
        input: PathBuf,
        /// Bracketed parses, one per sentence.
        #[arg(long)]
        trees: Option<PathBuf>,
    },
    /// Print the theme concept of one document.
    Theme {
        input: PathBuf,
        #[arg(long)]
        trees: Option<PathBuf>,
    },
    /// Print the domain decision for one document.
    Domain { input: PathBuf },
    /// Run a SELECT query against a Turtle graph.
    Query {
        graph: PathBuf,
        /// Query text, or `@file` to read it from a file.
        query: String,
    },
    /// Extract and score against a gold file.
    Eval {
        gold: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Average printed elsewhere to compare with the recomputed one.
        #[arg(long)]
        expect_average: Option<f64>,
    },
    /// Lexicon utilities.
    Lexicon {
        #[command(subcommand)]
        command: LexiconCommand,
    },
}

#[derive(Subcommand)]
enum LexiconCommand {
    /// Build a lexicon from the schema's class and attribute names.
    Derive {
        /// Domain name written in the header.
        #[arg(long)]
        domain: String,
        /// Lexicon file whose terms are added with their weights.
        #[arg(long)]
        seed: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Failure that is the program's fault rather than its input's.
#[derive(Debug, thiserror::Error)]
#[error("internal error: {0}")]
struct Internal(String);

fn read_text(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_schemas(g: &Global) -> anyhow::Result<OntologySchema> {
    if g.schema.is_empty() {
        return Ok(OntologySchema::hotel().merge(OntologySchema::hospital())?);
    }
    let mut out = OntologySchema::default();
    for p in &g.schema {
        let s = load_schema(&read_text(p)?).with_context(|| format!("schema {}", p.display()))?;
        out = out.merge(s)?;
    }
    Ok(out)
}

fn load_config(g: &Global) -> anyhow::Result<PipelineConfig> {
    let schema = load_schemas(g)?;
    let rules = match &g.rules {
        Some(p) => parse_rules(&read_text(p)?).with_context(|| format!("rules {}", p.display()))?,
        None => RuleSet::hotel(),
    };
    let lexicons = if g.lexicons.is_empty() {
        vec![SemanticLexicon::hotel(), SemanticLexicon::hospital()]
    } else {
        g.lexicons
            .iter()
            .map(|p| parse_lexicon(&read_text(p)?).with_context(|| format!("lexicon {}", p.display())))
            .collect::<anyhow::Result<_>>()?
    };
    let tag_lexicon = match &g.tag_lexicon {
        Some(p) => TagLexicon::parse(&read_text(p)?).with_context(|| format!("tag lexicon {}", p.display()))?,
        None => TagLexicon::bundled(),
    };
    let config = PipelineConfig {
        schema,
        lexicons,
        rules: rules.with_gaps(g.gap, g.text_gap),
        tag_lexicon,
        base_iri: g.base_iri.clone(),
        hint: g.hint.clone(),
        execution: if g.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    config.validate()?;
    Ok(config)
}

fn single_document(input: &Path, trees: Option<&Path>) -> anyhow::Result<Document> {
    let name = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "-".into());
    let mut doc = Document::new(name, read_text(input)?);
    if let Some(t) = trees {
        doc.trees = Some(parse_tree_file(t, &read_text(t)?)?);
    }
    Ok(doc)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Extract { inputs, output } => {
            let config = load_config(g)?;
            let docs = load_documents(inputs)?;
            let run = run_extract(&config, &docs)?;
            for line in &run.log {
                eprintln!("{line}");
            }
            let ttl = serialize_turtle(&run.graph);
            let reparsed = parse_turtle(&ttl).map_err(|e| Internal(format!("serialized graph does not parse: {e}")))?;
            if reparsed.triples.len() != run.graph.len() {
                return Err(Internal("serialized graph lost triples".into()).into());
            }
            write_or_print(output.as_deref(), &ttl)?;
        }
        Command::Triples { input, trees } => {
            let config = load_config(g)?;
            let r = process_document(&config, &single_document(input, trees.as_deref())?)?;
            for t in &r.triples {
                match g.format {
                    Format::Text => println!("{}: ({}, {}, {})", t.sentence_index, t.subject, t.predicate, t.object),
                    Format::Tsv => println!("{}\t{}\t{}\t{}", t.sentence_index, t.subject, t.predicate, t.object),
                }
            }
        }
        Command::Theme { input, trees } => {
            let config = load_config(g)?;
            let r = process_document(&config, &single_document(input, trees.as_deref())?)?;
            let th = &r.theme;
            let sep = if g.format == Format::Tsv { "\t" } else { "=" };
            println!("theme{sep}{}", th.theme.as_deref().unwrap_or(""));
            println!("relaxed{sep}{}", th.relaxed);
            println!("subjects{sep}{}", th.subjects.join(","));
            println!("maxoccur{sep}{}", th.candidates.join(","));
        }
        Command::Domain { input } => {
            let config = load_config(g)?;
            let doc = single_document(input, None)?;
            let tokens: Vec<_> = obie::textprep::analyze(&doc.text, &config.tag_lexicon, None)
                .into_iter()
                .flat_map(|s| s.tagged)
                .collect();
            let d = infer_domain(&tokens, &config.lexicons, config.hint.as_deref())?;
            let text = d.render();
            match g.format {
                Format::Text => print!("{text}"),
                Format::Tsv => {
                    for line in text.lines() {
                        println!("{}", line.replacen('=', "\t", 1));
                    }
                }
            }
        }
        Command::Query { graph, query } => {
            let doc = parse_turtle(&read_text(graph)?).with_context(|| format!("graph {}", graph.display()))?;
            let text = match query.strip_prefix('@') {
                Some(p) => read_text(Path::new(p))?,
                None => query.clone(),
            };
            let mut prefixes: BTreeMap<String, String> = default_prefixes(&g.base_iri);
            prefixes.extend(doc.prefixes.clone());
            let q = parse_query(&text, &prefixes)?;
            let table = execute_query(&doc.triples, &q);
            print!("{}", table.render(&prefixes));
        }
        Command::Eval {
            gold,
            inputs,
            expect_average,
        } => {
            let config = load_config(g)?;
            let gold = parse_gold(&read_text(gold)?).with_context(|| format!("gold {}", gold.display()))?;
            let docs = load_documents(inputs)?;
            let out = run_eval(&config, &docs, &gold)?;
            for e in &out.errors {
                eprintln!("error: {e}");
            }
            let Some(summary) = out.summary else {
                bail!("no document could be scored");
            };
            let fmt = match g.format {
                Format::Text => ReportFormat::Text,
                Format::Tsv => ReportFormat::Tsv,
            };
            print!("{}", summary.render(fmt));
            if let Some(note) = expect_average.and_then(|p| summary.discrepancy(p)) {
                println!("note: {note}");
            }
            if !out.errors.is_empty() {
                bail!("{} gold document(s) could not be scored", out.errors.len());
            }
        }
        Command::Lexicon {
            command: LexiconCommand::Derive { domain, seed, output },
        } => {
            let schema = load_schemas(g)?;
            let extra: Vec<(String, f64)> = match seed {
                Some(p) => parse_lexicon(&read_text(p)?)
                    .with_context(|| format!("seed {}", p.display()))?
                    .terms
                    .into_iter()
                    .collect(),
                None => Vec::new(),
            };
            let lex = derive_lexicon(domain, &schema, &extra);
            write_or_print(output.as_deref(), &lex.to_string())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = e.downcast_ref::<Internal>().is_some()
                || e
                    .downcast_ref::<obie::pipeline::PipelineError>()
                    .is_some_and(|p| p.is_internal());
            ExitCode::from(if internal { 2 } else { 1 })
        }
    }
}
