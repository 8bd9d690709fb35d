use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use snipforge_core::config::CONFIG_ENV;
use snipforge_core::eval::{emit_report, parse_sessions, run_sessions, ItemRecord};
use snipforge_core::snippet::SnippetRecord;
use snipforge_core::{synth, AppConfig, Error, JudgeabilityReport, SnippetMode, Workspace};

const USAGE: u8 = 2;
const DATA: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "snipforge",
    version,
    about = "Semantic snippets from scored page segments"
)]
struct Cli {
    /// JSON config file.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    /// Directory holding ingested pages and the index.
    #[arg(long, global = true, default_value = ".snipforge")]
    data_dir: PathBuf,

    /// Number of results per query.
    #[arg(long, global = true)]
    mu: Option<usize>,

    /// Snippet length limit in characters.
    #[arg(long, global = true)]
    budget: Option<usize>,

    /// How many top-weighted segments the semantic snippet may draw from.
    #[arg(long, global = true)]
    top_segments: Option<usize>,

    /// Match window size in characters.
    #[arg(long, global = true)]
    window: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Copy a directory of `.html` pages (with optional `.meta` sidecars) into the data dir.
    Ingest { dir: PathBuf },
    /// Build the inverted index over the ingested pages.
    Index,
    /// Rank pages for a query and print a snippet for each.
    Search {
        query: String,
        #[arg(long, value_enum, default_value_t = Mode::Semantic)]
        mode: Mode,
        #[arg(long)]
        json: bool,
    },
    /// Print the snippet of one page for a query.
    Snippet {
        doc_id: String,
        query: String,
        #[arg(long, value_enum, default_value_t = Mode::Semantic)]
        mode: Mode,
        #[arg(long)]
        json: bool,
    },
    /// Compare simple and semantic snippets over a sessions file.
    Eval {
        #[arg(long)]
        sessions: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the effective configuration.
    ConfigDump,
    /// Write a seeded synthetic corpus and sessions file.
    Synth {
        #[arg(long, default_value_t = 2011)]
        seed: u64,
        #[arg(long, default_value_t = 120)]
        pages: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Semantic,
    Simple,
}

impl From<Mode> for SnippetMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Semantic => SnippetMode::Semantic,
            Mode::Simple => SnippetMode::Simple,
        }
    }
}

fn config(cli: &Cli) -> anyhow::Result<AppConfig> {
    let mut cfg = AppConfig::load(cli.config.as_deref())?;
    if let Some(v) = cli.mu {
        cfg.mu = v;
    }
    if let Some(v) = cli.budget {
        cfg.budget_chars = v;
    }
    if let Some(v) = cli.top_segments {
        cfg.top_segments = v;
    }
    if let Some(v) = cli.window {
        cfg.match_window_chars = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, out: &mut impl Write) -> anyhow::Result<()> {
    let cfg = config(cli)?;
    let ws = Workspace::new(&cli.data_dir);
    match &cli.command {
        Command::Ingest { dir } => {
            let n = ws.ingest(dir)?;
            writeln!(out, "ingested {n} pages into {}", ws.pages_dir().display())?;
        }
        Command::Index => {
            let index = ws.build_index(&cfg)?;
            writeln!(
                out,
                "indexed {} documents, {} terms into {}",
                index.doc_count(),
                index.terms().count(),
                ws.index_path().display()
            )?;
        }
        Command::Search { query, mode, json } => {
            let engine = ws.open_engine(&cfg)?;
            let hits = engine.search(query, (*mode).into())?;
            if *json {
                let results: Vec<_> = hits
                    .iter()
                    .enumerate()
                    .map(|(i, h)| {
                        json!({
                            "rank": i + 1,
                            "doc_id": h.doc_id,
                            "score": h.score,
                            "snippet": h.snippet.rendered,
                            "fragments": h.snippet.fragments,
                        })
                    })
                    .collect();
                let doc =
                    json!({ "query": query, "mode": SnippetMode::from(*mode), "results": results });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            } else {
                if hits.is_empty() {
                    writeln!(out, "no results")?;
                }
                for (i, h) in hits.iter().enumerate() {
                    writeln!(out, "{}. {} ({:.6})", i + 1, h.doc_id, h.score)?;
                    writeln!(out, "   {}", h.snippet.rendered)?;
                }
            }
        }
        Command::Snippet {
            doc_id,
            query,
            mode,
            json,
        } => {
            let engine = ws.open_engine(&cfg)?;
            let snippet = engine.snippet(doc_id, query, (*mode).into())?;
            if *json {
                let record = SnippetRecord::new(doc_id, &snippet);
                writeln!(out, "{}", serde_json::to_string_pretty(&record)?)?;
            } else {
                writeln!(out, "{}", snippet.rendered)?;
            }
        }
        Command::Eval { sessions, out: dir } => {
            let engine = ws.open_engine(&cfg)?;
            let text = std::fs::read_to_string(sessions)
                .with_context(|| format!("reading sessions file {}", sessions.display()))?;
            let specs = parse_sessions(&text)?;
            let outcomes = run_sessions(&specs, &engine)?;
            let report = JudgeabilityReport::from_outcomes(&outcomes);
            let items: Vec<ItemRecord> = outcomes.into_iter().flat_map(|o| o.items).collect();
            emit_report(&report, &items, dir)?;
            writeln!(
                out,
                "{} sessions: mean simple {:.2}, mean semantic {:.2}; report in {}",
                report.sessions.len(),
                report.mean_simple(),
                report.mean_semantic(),
                dir.display()
            )?;
            if !report.zero_result_sessions.is_empty() {
                writeln!(
                    out,
                    "sessions without results: {}",
                    report.zero_result_sessions.join(", ")
                )?;
            }
        }
        Command::ConfigDump => writeln!(out, "{}", cfg.dump())?,
        Command::Synth {
            seed,
            pages,
            out: dir,
        } => {
            let corpus = synth::generate(*seed, *pages);
            corpus.write_to(dir)?;
            writeln!(
                out,
                "wrote {} pages and {} sessions to {}",
                corpus.pages.len(),
                corpus.sessions.len(),
                dir.display()
            )?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::ConfigBound { .. } | Error::EmptyQuery(_)) => USAGE,
        _ => DATA,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
