//! `topiclens`: train topic models over a CSV corpus, inspect them, export
//! filtered selections, and serve the exploration API.
//!
//! Exit codes: 0 on success, 1 when a stage fails at runtime, 2 on usage
//! errors. Tables go to stdout, diagnostics to stderr.

mod settings;

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use topiclens::analytics::{top_topic_words, topic_label, AnalyticsConfig};
use topiclens::config::ConfigFile;
use topiclens::corpus::{self, PreprocessConfig};
use topiclens::filter::{self, FilterState};
use topiclens::lda::{self, TrainedModel};
use topiclens::Analytics;
use topiclens_server::ServerConfig;

use settings::{Settings, UsageError};

#[derive(Parser, Debug)]
#[command(name = "topiclens", version, about = "Topic-model corpus exploration")]
struct Cli {
    /// Plain key=value config file. Command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ingest, preprocess and train; writes a model file and prints a summary.
    Train(TrainArgs),
    /// Serve the HTTP API for a trained model.
    Serve(ServeArgs),
    /// Print the top words of every topic as TSV.
    TopWords(TopWordsArgs),
    /// Print the CSV export of a filter state.
    Export(ExportArgs),
}

#[derive(Args, Debug, Default)]
pub struct TrainArgs {
    /// CSV corpus with a header row.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Output model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Number of topics.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub df_ratio_threshold: Option<f64>,
    #[arg(long)]
    pub min_topic_prob: Option<f64>,
    #[arg(long)]
    pub min_token_length: Option<usize>,
    #[arg(long)]
    pub stopword_file: Option<PathBuf>,
    #[arg(long)]
    pub title_column: Option<String>,
    #[arg(long)]
    pub body_column: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct ServeArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub session_ttl_seconds: Option<u64>,
    /// Directory holding the UI bundle, served at `/`.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TopWordsArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    /// Words per topic.
    #[arg(long, default_value_t = topiclens::analytics::DEFAULT_TOP_WORDS)]
    k: usize,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    /// Filter state JSON. Missing or empty means no filtering.
    #[arg(long)]
    filter: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        match err.downcast::<UsageError>() {
            Ok(usage) => Failure::Usage(usage.0),
            Err(err) => Failure::Runtime(err),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path).with_context(|| format!("reading config {}", path.display()))?,
        None => ConfigFile::default(),
    };
    let settings = Settings::new(file);
    match cli.command {
        Command::Train(args) => train(&settings, &args)?,
        Command::Serve(args) => serve(&settings, &args)?,
        Command::TopWords(args) => top_words(&settings, &args)?,
        Command::Export(args) => export(&settings, &args)?,
    }
    Ok(())
}

fn load_model(path: &Path) -> anyhow::Result<TrainedModel> {
    lda::load_model(path).with_context(|| format!("loading model {}", path.display()))
}

fn train(settings: &Settings, args: &TrainArgs) -> anyhow::Result<()> {
    let corpus_path = settings.required_path(args.corpus.as_ref(), "corpus_path", "--corpus")?;
    let model_path = settings.path(args.model.as_ref(), "model_path").unwrap_or_else(|| PathBuf::from("model.json"));
    let hyper = settings.hyperparams(args)?;
    let preprocess_cfg = PreprocessConfig {
        df_ratio_threshold: settings
            .value(args.df_ratio_threshold, "df_ratio_threshold")?
            .unwrap_or(corpus::DEFAULT_DF_RATIO_THRESHOLD),
        stopwords: match settings.path(args.stopword_file.as_ref(), "stopword_file") {
            Some(path) => {
                let file = File::open(&path).with_context(|| format!("opening stopword file {}", path.display()))?;
                corpus::read_stopwords(BufReader::new(file))?
            }
            None => corpus::default_stopwords(),
        },
        min_token_length: settings
            .value(args.min_token_length, "min_token_length")?
            .unwrap_or(corpus::DEFAULT_MIN_TOKEN_LENGTH),
    };
    let title_column = settings.string(args.title_column.as_ref(), "title_column").unwrap_or_else(|| "title".into());
    let body_column = settings.string(args.body_column.as_ref(), "body_column").unwrap_or_else(|| "body".into());

    let source = File::open(&corpus_path).with_context(|| format!("opening corpus {}", corpus_path.display()))?;
    let raw = corpus::ingest(BufReader::new(source), &title_column, &body_column).context("ingesting corpus")?;
    let prepared = corpus::preprocess(&raw, &preprocess_cfg).context("preprocessing corpus")?;
    let c = &prepared.corpus;
    eprintln!(
        "training {} topics on {} documents, {} terms, {} tokens ({} sweeps)",
        hyper.k,
        c.num_docs(),
        c.vocab_size(),
        c.num_tokens(),
        hyper.iterations
    );
    let model = lda::train_gibbs(c, &hyper).context("training")?;
    let ll = lda::log_likelihood(c, &model)?;
    let trained = TrainedModel::new(model, c.vocabulary.clone(), c.titles.clone())?;
    lda::save_model(&model_path, &trained).with_context(|| format!("writing model {}", model_path.display()))?;

    let mut out = io::stdout().lock();
    writeln!(out, "documents\t{}", c.num_docs())?;
    writeln!(out, "vocabulary\t{}", c.vocab_size())?;
    writeln!(out, "topics\t{}", hyper.k)?;
    writeln!(out, "tokens\t{}", c.num_tokens())?;
    writeln!(out, "removed_terms\t{}", prepared.removed_terms.iter().cloned().collect::<Vec<_>>().join(";"))?;
    writeln!(out, "empty_documents\t{}", c.empty_docs().len())?;
    writeln!(out, "log_likelihood\t{ll}")?;
    writeln!(out, "model\t{}", model_path.display())?;
    Ok(())
}

fn serve(settings: &Settings, args: &ServeArgs) -> anyhow::Result<()> {
    tracing_subscriber::fmt().with_writer(io::stderr).init();
    let config = ServerConfig {
        port: settings.value(args.port, "port")?.unwrap_or(topiclens_server::DEFAULT_PORT),
        session_ttl: settings
            .value(args.session_ttl_seconds, "session_ttl_seconds")?
            .map_or(topiclens_server::DEFAULT_SESSION_TTL, Duration::from_secs),
        static_dir: settings.path(args.static_dir.as_ref(), "static_dir"),
    };
    let analytics = match settings.path(args.model.as_ref(), "model_path") {
        Some(path) => Some(Analytics::new(&load_model(&path)?, AnalyticsConfig::default())?),
        None => {
            eprintln!("no model given; API endpoints answer 503 until one is loaded");
            None
        }
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(topiclens_server::serve(config, analytics)).context("server failed")?;
    Ok(())
}

fn top_words(settings: &Settings, args: &TopWordsArgs) -> anyhow::Result<()> {
    if args.k == 0 {
        return Err(UsageError("--k must be at least 1".into()).into());
    }
    let path = settings.required_path(args.model.as_ref(), "model_path", "--model")?;
    let trained = load_model(&path)?;
    let mut out = io::stdout().lock();
    writeln!(out, "topic\trank\tterm\tprobability")?;
    for (topic, words) in top_topic_words(&trained.model.phi, args.k).iter().enumerate() {
        for (rank, &(term, p)) in words.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}\t{p}", topic_label(topic), rank + 1, trained.vocabulary.term(term))?;
        }
    }
    Ok(())
}

fn export(settings: &Settings, args: &ExportArgs) -> anyhow::Result<()> {
    let path = settings.required_path(args.model.as_ref(), "model_path", "--model")?;
    let state = match &args.filter {
        Some(filter_path) => {
            let text =
                fs::read_to_string(filter_path).with_context(|| format!("reading filter {}", filter_path.display()))?;
            if text.trim().is_empty() {
                FilterState::default()
            } else {
                filter::parse_state(&text).with_context(|| format!("parsing filter {}", filter_path.display()))?
            }
        }
        None => FilterState::default(),
    };
    let analytics = Analytics::new(&load_model(&path)?, AnalyticsConfig::default())?;
    let selection = filter::apply(&state, &analytics)?;
    let mut out = io::stdout().lock();
    filter::export_csv(&selection, &analytics, &mut out)?;
    out.flush()?;
    Ok(())
}
