use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use beliefmine_cli::{fixtures, run, Command, RunConfig, RunOptions};
use beliefmine_core::classifier::Solver;
use beliefmine_core::parsemedian::DistanceMode;
use beliefmine_core::Exec;
use clap::{Args, Parser, Subcommand};

/// Belief and persuasion mining over tweet/reply corpora.
#[derive(Parser)]
#[command(name = "beliefmine", version)]
struct Cli {
    /// TOML file with run settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "BELIEFMINE_OUT", default_value = "out")]
    out: PathBuf,
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate the corpus and link replies to source posts.
    Ingest,
    /// Generate and sentiment-filter embedding-neighbour variants.
    Augment,
    /// Fit and evaluate the TF-IDF belief classifier.
    Train,
    /// Label unannotated replies with a trained model.
    Predict {
        /// Model file; defaults to `<out>/model.json`.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Hashtag graph, Louvain partition, layout and belief profiles.
    Communities,
    /// Parse-string medoids and nearest-medoid accuracy.
    Persuasion,
    /// Belief tables by topic and by source.
    Report,
    /// Every stage in order.
    Pipeline,
    /// Write the synthetic corpus and embedding table.
    Fixture,
}

#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    embeddings: Option<PathBuf>,
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    #[arg(long, global = true)]
    sentiment_rules: Option<PathBuf>,
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    #[arg(long, global = true)]
    sources: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    neighbors: Option<usize>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    augment_sample: Option<usize>,
    #[arg(long, global = true)]
    responses_per_tweet: Option<usize>,
    #[arg(long, global = true)]
    ngram_min: Option<usize>,
    #[arg(long, global = true)]
    ngram_max: Option<usize>,
    #[arg(long, global = true)]
    train_split: Option<f64>,
    #[arg(long, global = true, value_parser = parse_solver)]
    solver: Option<Solver>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[arg(long, global = true)]
    learning_rate: Option<f64>,
    #[arg(long, global = true)]
    regularization: Option<f64>,
    #[arg(long, global = true)]
    binary_weights: bool,
    #[arg(long, global = true)]
    keep_isolated: bool,
    #[arg(long, global = true)]
    louvain_runs: Option<usize>,
    #[arg(long, global = true)]
    layout_iterations: Option<usize>,
    #[arg(long, global = true)]
    top_hashtags: Option<usize>,
    #[arg(long, global = true)]
    top_sources: Option<usize>,
    #[arg(long, global = true, value_parser = parse_mode)]
    distance_mode: Option<DistanceMode>,
    #[arg(long, global = true)]
    emit_distances: bool,
}

fn parse_enum<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|e| e.to_string())
}

fn parse_solver(s: &str) -> Result<Solver, String> {
    parse_enum(s)
}

fn parse_mode(s: &str) -> Result<DistanceMode, String> {
    parse_enum(s)
}

macro_rules! overlay {
    ($cfg:ident, $o:ident, $($field:ident),*) => {
        $(if let Some(v) = $o.$field { $cfg.$field = v.into(); })*
    };
}

impl Overrides {
    fn apply(self, mut cfg: RunConfig) -> RunConfig {
        let o = self;
        overlay!(cfg, o, corpus, embeddings, lexicon, sentiment_rules, stopwords, sources, augment_sample, responses_per_tweet);
        overlay!(cfg, o, seed, neighbors, tolerance, ngram_min, ngram_max, train_split, solver, epochs, learning_rate);
        overlay!(cfg, o, regularization, louvain_runs, layout_iterations, top_hashtags, top_sources, distance_mode);
        cfg.binary_weights |= o.binary_weights;
        cfg.keep_isolated |= o.keep_isolated;
        cfg.emit_distances |= o.emit_distances;
        cfg
    }
}

fn error_kind(err: &anyhow::Error) -> &'static str {
    use beliefmine_core::{augment, classifier, community, corpus, parsemedian, sentiment, textprep};
    for cause in err.chain() {
        if cause.is::<corpus::CorpusError>() {
            return "corpus";
        } else if cause.is::<textprep::TextError>() {
            return "textprep";
        } else if cause.is::<sentiment::LexiconError>() {
            return "sentiment";
        } else if cause.is::<augment::AugmentError>() {
            return "augment";
        } else if cause.is::<classifier::ClassifierError>() {
            return "classifier";
        } else if cause.is::<community::CommunityError>() {
            return "community";
        } else if cause.is::<parsemedian::ParseMedianError>() {
            return "parsemedian";
        } else if cause.is::<std::io::Error>() {
            return "io";
        }
    }
    "config"
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>> {
    let base = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let config = cli.overrides.apply(base);
    config.validate()?;
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let (command, model) = match cli.command {
        Cmd::Fixture => return fixtures::write(&cli.out, &config),
        Cmd::Ingest => (Command::Ingest, None),
        Cmd::Augment => (Command::Augment, None),
        Cmd::Train => (Command::Train, None),
        Cmd::Predict { model } => (Command::Predict, model),
        Cmd::Communities => (Command::Communities, None),
        Cmd::Persuasion => (Command::Persuasion, None),
        Cmd::Report => (Command::Report, None),
        Cmd::Pipeline => (Command::Pipeline, None),
    };
    run(command, &config, &cli.out, &RunOptions { model, exec })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let report = serde_json::json!({
                "error": {
                    "kind": error_kind(&err),
                    "message": err.to_string(),
                    "causes": err.chain().skip(1).map(|c| c.to_string()).collect::<Vec<_>>(),
                }
            });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
