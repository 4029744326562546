mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "slcsas",
    version,
    about = "Find future-event expressions in Arabic economic news"
)]
struct Cli {
    /// Flat key = value settings file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (corpus dir for ingest, results dir for analyze)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Turn HTML pages into corpus files
    Ingest(IngestArgs),
    /// Run the rules over a corpus and write annotations and reports
    Analyze(AnalyzeArgs),
    /// Score annotations against a gold file
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory of .html/.htm files, or a file listing one URL or path per line
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub min_run_chars: Option<usize>,
    /// Pause between two requests to one host, in milliseconds
    #[arg(long)]
    pub delay: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RuleArgs {
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub variables: Option<PathBuf>,
    #[arg(long)]
    pub semantic_map: Option<PathBuf>,
    /// Extra lexicon files, added to the bundled lists
    #[arg(long)]
    pub lexicon_dir: Option<PathBuf>,
    /// Sentence triggers, e.g. `dot-space,question` or `all`
    #[arg(long)]
    pub boundaries: Option<String>,
    /// Punctuation between marker words blocks a match
    #[arg(long)]
    pub strict_adjacency: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub rules: RuleArgs,
    /// Shade every negative field, not only those of rules that fired
    #[arg(long)]
    pub show_all_negative_fields: bool,
    /// Fixed timestamp for the reports instead of the current time
    #[arg(long)]
    pub clock: Option<String>,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false, args = ["corpus", "annotations"])]
pub struct EvalArgs {
    /// Corpus directory, analyzed on the fly
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// annotations.jsonl written by analyze
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long)]
    pub gold: PathBuf,
    /// Write the results as JSON here
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub rules: RuleArgs,
}

pub struct Global {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = Global {
        config: cli.config,
        out: cli.out,
        jobs: cli.jobs,
    };
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(&global, &a),
        Command::Analyze(a) => commands::analyze(&global, &a),
        Command::Eval(a) => commands::eval(&global, &a),
    };
    match result {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            commands::USAGE_ERROR.into()
        }
    }
}

/// The error chain on one line, skipping causes a message already quotes.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if out.contains(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}
