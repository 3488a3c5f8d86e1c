//! Operator commands. Each command opens the store snapshot, runs one
//! operation and writes the snapshot back when it changed anything.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use clap::{Parser, Subcommand, ValueEnum};

use curio_core::annotation::{self, AnnotationFilter, ExportFormat, Status};
use curio_core::ns::{rdf, skos};
use curio_core::quality::{self, Policy};
use curio_core::store::rdf_io::parse_turtle;
use curio_core::{collection, domain, vocabulary, Dataset, Iri, Store, Term};

use crate::api::{self, AppState, Config, InteractionLog};

#[derive(Parser)]
#[command(name = "curio", version, about = "Annotation platform for collection images")]
pub struct Cli {
    /// Store snapshot file (created on first write).
    #[arg(long, global = true, env = "CURIO_STORE", default_value = "curio-store.nq")]
    pub store: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ExportKind {
    Csv,
    Nt,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    SingleReviewer,
    Majority,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run the HTTP/JSON service.
    Serve {
        #[arg(long, env = "CURIO_LISTEN", default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Session lifetime in seconds.
        #[arg(long, env = "CURIO_SESSION_TTL", default_value_t = 43_200)]
        session_ttl: i64,
        /// Accept a `seed` parameter on task requests.
        #[arg(long)]
        allow_seed: bool,
        /// Append interaction log entries to this JSON Lines file.
        #[arg(long)]
        interaction_log: Option<PathBuf>,
    },
    /// Load a SKOS concept scheme from Turtle or N-Triples.
    LoadVocabulary {
        #[arg(long)]
        file: PathBuf,
        /// Scheme IRI; needed only when the file declares several schemes.
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Ingest collection objects (JSON Lines) and bind them to a domain.
    LoadCollection {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        domain: String,
    },
    /// Load one or more domain definitions (JSON).
    LoadDomain {
        #[arg(long)]
        file: PathBuf,
    },
    /// Load a gold standard CSV (`object_id,field,concept_iri`).
    LoadGold {
        #[arg(long)]
        file: PathBuf,
        /// Scheme of the gold concepts; inferred when omitted.
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Write annotations as CSV or N-Triples.
    Export {
        #[arg(long, value_enum, default_value = "csv")]
        format: ExportKind,
        #[arg(long)]
        status: Option<String>,
        #[arg(long)]
        user: Option<String>,
        #[arg(long)]
        field: Option<String>,
        #[arg(long, default_value = "en")]
        lang: String,
        /// Output file; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Annotation counts by field, input type and context.
    Stats {
        #[arg(long)]
        domain: String,
        #[arg(long, value_enum, default_value = "table")]
        format: ReportFormat,
    },
    /// Score annotations against a gold standard.
    EvaluateGold {
        /// Gold standard CSV; the stored gold standard when omitted.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        scheme: Option<String>,
        /// Only annotations on this field.
        #[arg(long)]
        field: Option<String>,
        /// Also count matches at any ancestor of a gold concept.
        #[arg(long)]
        any_ancestor: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: ReportFormat,
    },
    /// Turn review decisions into accepted/rejected statuses.
    FinalizeReviews {
        #[arg(long, value_enum)]
        policy: PolicyArg,
    },
    /// Write a copy of the store to a file.
    Snapshot {
        #[arg(long)]
        output: PathBuf,
    },
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return u8::try_from(e.exit_code()).unwrap_or(2);
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<curio_core::Error>() {
                Some(curio_core::Error::Usage(_)) => 2,
                _ => 1,
            }
        }
    }
}

fn open_store(path: &Path) -> anyhow::Result<Store> {
    if path.exists() {
        Store::open(path).with_context(|| format!("cannot open store {}", path.display()))
    } else {
        Ok(Store::new())
    }
}

fn read_file(path: &Path) -> anyhow::Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_iri(value: &str) -> anyhow::Result<Iri> {
    Ok(Iri::new(value)?)
}

/// The scheme a vocabulary file describes: its one declared
/// `skos:ConceptScheme`, else the one target of its `skos:inScheme` links.
fn scheme_in_file(bytes: &[u8]) -> anyhow::Result<Iri> {
    let triples = parse_turtle(bytes)?;
    let scheme_class = Term::Iri(parse_iri(skos::CONCEPT_SCHEME)?);
    let mut schemes: BTreeSet<Iri> = triples
        .iter()
        .filter(|t| t.predicate.as_str() == rdf::TYPE && t.object == scheme_class)
        .map(|t| t.subject.clone())
        .collect();
    if schemes.is_empty() {
        schemes = triples
            .iter()
            .filter(|t| t.predicate.as_str() == skos::IN_SCHEME)
            .filter_map(|t| t.object.as_iri().cloned())
            .collect();
    }
    match schemes.len() {
        1 => Ok(schemes.into_iter().next().unwrap()),
        0 => bail!("the file names no concept scheme; pass --scheme"),
        n => bail!("the file names {n} concept schemes; pass --scheme"),
    }
}

/// The one scheme containing every concept of a gold file.
fn gold_scheme(ds: &Dataset, bytes: &[u8]) -> anyhow::Result<Iri> {
    let rows = quality::parse_gold_csv(bytes)?;
    let in_scheme = parse_iri(skos::IN_SCHEME)?;
    let mut common: Option<BTreeSet<Iri>> = None;
    for (_, _, concept) in &rows {
        let schemes: BTreeSet<Iri> = ds.object_iris(None, concept, &in_scheme).into_iter().collect();
        common = Some(match common {
            None => schemes,
            Some(c) => c.intersection(&schemes).cloned().collect(),
        });
    }
    let common = common.unwrap_or_default();
    match common.len() {
        1 => Ok(common.into_iter().next().unwrap()),
        0 => bail!("no loaded scheme contains every gold concept; load the vocabulary or pass --scheme"),
        _ => bail!("gold concepts belong to several schemes; pass --scheme"),
    }
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let store_path = cli.store;
    let store = open_store(&store_path)?;
    let save = |store: &Store| -> anyhow::Result<()> {
        store
            .snapshot(&store_path)
            .with_context(|| format!("cannot write store {}", store_path.display()))
    };
    match cli.command {
        Command::Serve {
            listen,
            session_ttl,
            allow_seed,
            interaction_log,
        } => {
            let log = match &interaction_log {
                Some(path) => InteractionLog::with_file(path).with_context(|| format!("cannot open {}", path.display()))?,
                None => InteractionLog::default(),
            };
            let config = Config {
                snapshot: Some(store_path.clone()),
                session_ttl: chrono::Duration::seconds(session_ttl),
                allow_seed,
            };
            serve(AppState::new(store, config, log), listen)
        }
        Command::LoadVocabulary { file, scheme } => {
            let bytes = read_file(&file)?;
            let scheme = match scheme {
                Some(s) => parse_iri(&s)?,
                None => scheme_in_file(&bytes)?,
            };
            let report = vocabulary::load_scheme(&mut store.write(), &bytes, &scheme)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            save(&store)?;
            println!("loaded {} concepts into {}", report.added, scheme);
            Ok(())
        }
        Command::LoadCollection { file, domain: domain_id } => {
            let bytes = read_file(&file)?;
            let report = {
                let mut ds = store.write();
                domain::get_domain(&ds, &domain_id)?;
                let report = collection::ingest_objects(&mut ds, &bytes)?;
                collection::bind_to_domain(&mut ds, &domain_id, &report.source_collections)?;
                report
            };
            for s in &report.skipped {
                eprintln!("skipped line {}{}: {}", s.line, s.id.as_ref().map(|i| format!(" ({i})")).unwrap_or_default(), s.reason);
            }
            save(&store)?;
            println!("ingested {} objects into domain {domain_id}, skipped {}", report.ingested, report.skipped.len());
            Ok(())
        }
        Command::LoadDomain { file } => {
            let loaded = domain::load_domains(&mut store.write(), &read_file(&file)?)?;
            save(&store)?;
            for d in loaded {
                println!("loaded domain {} ({} fields)", d.id, d.fields.len());
            }
            Ok(())
        }
        Command::LoadGold { file, scheme } => {
            let bytes = read_file(&file)?;
            let gold = {
                let mut ds = store.write();
                let scheme = match scheme {
                    Some(s) => parse_iri(&s)?,
                    None => gold_scheme(&ds, &bytes)?,
                };
                quality::load_gold(&mut ds, &bytes, &scheme)?
            };
            save(&store)?;
            println!("gold standard has {} entries in {}", gold.entries.len(), gold.scheme);
            Ok(())
        }
        Command::Export {
            format,
            status,
            user,
            field,
            lang,
            output,
        } => {
            let filter = AnnotationFilter {
                status: status.map(|s| s.parse::<Status>()).transpose()?,
                user,
                field,
                ..Default::default()
            };
            let format = match format {
                ExportKind::Csv => ExportFormat::Csv,
                ExportKind::Nt => ExportFormat::NTriples,
            };
            let text = annotation::export_annotations(&store.read(), &filter, format, &lang)?;
            emit(output.as_deref(), &text)
        }
        Command::Stats { domain: domain_id, format } => {
            let stats = quality::domain_stats(&store.read(), &domain_id)?;
            let text = match format {
                ReportFormat::Table => stats.to_table(),
                ReportFormat::Csv => stats.to_csv(),
                ReportFormat::Json => serde_json::to_string_pretty(&stats)? + "\n",
            };
            emit(None, &text)
        }
        Command::EvaluateGold {
            gold,
            scheme,
            field,
            any_ancestor,
            format,
        } => {
            let ds = store.read();
            let gold = match gold {
                Some(path) => {
                    let bytes = read_file(&path)?;
                    let scheme = match scheme {
                        Some(s) => parse_iri(&s)?,
                        None => gold_scheme(&ds, &bytes)?,
                    };
                    let mut scratch = ds.clone();
                    quality::load_gold(&mut scratch, &bytes, &scheme)?
                }
                None => quality::read_gold(&ds)?,
            };
            let filter = AnnotationFilter { field, ..Default::default() };
            let annotations = annotation::list_annotations(&ds, &filter)?;
            let report = quality::evaluate_gold(&ds, &annotations, &gold, any_ancestor);
            let text = match format {
                ReportFormat::Table => format!("{}\n", report.summary),
                ReportFormat::Csv => {
                    let mut out = String::from("annotation_id,kind,steps\r\n");
                    for v in &report.verdicts {
                        let kind = serde_json::to_value(v.kind)?;
                        let steps = v.steps.map(|s| s.to_string()).unwrap_or_default();
                        out.push_str(&format!("{},{},{}\r\n", v.annotation, kind.as_str().unwrap_or_default(), steps));
                    }
                    out
                }
                ReportFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
            };
            emit(None, &text)
        }
        Command::FinalizeReviews { policy } => {
            let policy = match policy {
                PolicyArg::SingleReviewer => Policy::SingleReviewer,
                PolicyArg::Majority => Policy::Majority,
            };
            let report = quality::finalize_reviews(&mut store.write(), policy)?;
            save(&store)?;
            println!(
                "accepted {}, rejected {}, undecided {}",
                report.accepted.len(),
                report.rejected.len(),
                report.undecided.len()
            );
            Ok(())
        }
        Command::Snapshot { output } => {
            store
                .snapshot(&output)
                .with_context(|| format!("cannot write {}", output.display()))?;
            println!("wrote {} triples to {}", store.read().len(), output.display());
            Ok(())
        }
    }
}

fn serve(state: AppState, listen: SocketAddr) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(listen)
            .await
            .with_context(|| format!("cannot listen on {listen}"))?;
        let addr = listener.local_addr()?;
        println!("listening on http://{addr}");
        std::io::stdout().flush()?;
        log::info!("serving on {addr}");
        axum::serve(listener, api::router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
