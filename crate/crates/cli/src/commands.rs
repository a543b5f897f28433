//! Subcommand implementations. Each reads its inputs from the run
//! configuration and writes artifacts into the output directory.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use beliefmine_core::augment::{augment_batch, AugmentConfig, AugmentedVariant, EmbeddingTable, FilterOutcome};
use beliefmine_core::classifier::{evaluate, train, BeliefModel, EvalReport, SparseVector, TfidfVocabulary};
use beliefmine_core::community::{
    build_graph, layout, layout_csv, louvain_best_of, partition_map, profile, CommunityProfile, EdgeWeighting,
    GraphOptions, LayoutConfig, LouvainConfig,
};
use beliefmine_core::corpus::{
    belief_ratio, link_pairs, load_corpus, mentions_covid, rows_to_csv, sample_responses, source_belief_table,
    stratified_split, BeliefLabel, BeliefRow, LinkOptions, LinkReport, LinkedPair, SourceSet, TweetRecord,
};
use beliefmine_core::parsemedian::{
    distance_matrix, evaluate_structure_classifier, split_by_majority_response, MedianPair, Prediction,
};
use beliefmine_core::sentiment::ValenceLexicon;
use beliefmine_core::textprep::{Lemmatizer, Normalizer, Stopwords};
use beliefmine_core::Exec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::artifacts::{read_field, ArtifactWriter};
use crate::config::{RunConfig, DEFAULT_SOURCES};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Ingest,
    Augment,
    Train,
    Predict,
    Communities,
    Persuasion,
    Report,
    Pipeline,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Augment => "augment",
            Command::Train => "train",
            Command::Predict => "predict",
            Command::Communities => "communities",
            Command::Persuasion => "persuasion",
            Command::Report => "report",
            Command::Pipeline => "pipeline",
        }
    }
}

/// Where to read a previously trained model from.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub model: Option<PathBuf>,
    pub exec: Exec,
}

/// Runs `command` and returns every file written.
pub fn run(command: Command, config: &RunConfig, out: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    config.validate()?;
    match command {
        Command::Ingest => ingest(config, out),
        Command::Augment => augment(config, out, opts.exec),
        Command::Train => train_model(config, out, opts.exec),
        Command::Predict => predict(config, out, opts),
        Command::Communities => communities(config, out, opts.exec),
        Command::Persuasion => persuasion(config, out, opts.exec),
        Command::Report => report(config, out),
        Command::Pipeline => {
            let mut files = Vec::new();
            let mut steps = vec![Command::Ingest];
            if config.embeddings.is_some() {
                steps.push(Command::Augment);
            }
            steps.extend([Command::Train, Command::Predict, Command::Communities, Command::Persuasion, Command::Report]);
            for step in steps {
                log::info!("pipeline: {}", step.name());
                files.extend(run(step, config, out, opts)?);
            }
            Ok(files)
        }
    }
}

struct Inputs {
    records: Vec<TweetRecord>,
    link: LinkReport,
    /// Annotation batch when replies per source are capped.
    sample: Option<Vec<LinkedPair>>,
}

impl Inputs {
    fn load(config: &RunConfig) -> Result<Self> {
        let path = config.corpus_path()?;
        let records = load_corpus(path).with_context(|| format!("loading corpus {}", path.display()))?;
        let sources = match &config.sources {
            Some(p) => SourceSet::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
            None => SourceSet::parse(DEFAULT_SOURCES),
        };
        let link = link_pairs(&records, &sources, LinkOptions::default())?;
        let sample = config.responses_per_tweet.map(|k| sample_responses(&link.pairs, k, config.seed));
        Ok(Inputs { records, link, sample })
    }

    /// Replies with a resolved label, restricted to the annotation batch
    /// when one is configured.
    fn labeled(&self) -> Vec<(LinkedPair, BeliefLabel)> {
        self.sample
            .as_ref()
            .unwrap_or(&self.link.pairs)
            .iter()
            .filter_map(|p| p.response.belief_label().map(|l| (p.clone(), l)))
            .collect()
    }
}

fn normalizer(config: &RunConfig) -> Result<Normalizer> {
    let stopwords = match &config.stopwords {
        Some(p) => Stopwords::load(p)?,
        None => Stopwords::english(),
    };
    Ok(Normalizer::new(stopwords, Lemmatizer::bundled()))
}

fn lexicon(config: &RunConfig) -> Result<ValenceLexicon> {
    Ok(match &config.lexicon {
        Some(p) => ValenceLexicon::load(p, config.sentiment_rules.as_deref())?,
        None => ValenceLexicon::bundled(),
    })
}

#[derive(Serialize)]
struct PairRow<'a> {
    source_id: &'a str,
    source_author: &'a str,
    response_id: &'a str,
    response_author: &'a str,
    covid: bool,
    label: Option<BeliefLabel>,
}

fn pair_row(p: &LinkedPair) -> PairRow<'_> {
    PairRow {
        source_id: &p.source.id,
        source_author: &p.source.author,
        response_id: &p.response.id,
        response_author: &p.response.author,
        covid: mentions_covid(&p.source),
        label: p.response.belief_label(),
    }
}

#[derive(Serialize)]
struct IngestSummary {
    records: usize,
    pairs: usize,
    dangling_replies: usize,
    self_replies: usize,
    labeled: usize,
    annotated_without_majority: usize,
    unannotated: usize,
}

fn ingest(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let inputs = Inputs::load(config)?;
    let pairs = &inputs.link.pairs;
    let labeled = pairs.iter().filter(|p| p.response.belief_label().is_some()).count();
    let unannotated = pairs.iter().filter(|p| p.response.votes.as_ref().is_none_or(Vec::is_empty)).count();
    let mut w = ArtifactWriter::new(out, "ingest", config)?;
    let rows: Vec<PairRow> = pairs.iter().map(pair_row).collect();
    w.write_jsonl("pairs.jsonl", &rows)?;
    if let Some(sample) = &inputs.sample {
        let rows: Vec<PairRow> = sample.iter().map(pair_row).collect();
        w.write_jsonl("annotation_sample.jsonl", &rows)?;
    }
    w.write_json(
        "ingest.json",
        &IngestSummary {
            records: inputs.records.len(),
            pairs: pairs.len(),
            dangling_replies: inputs.link.dangling,
            self_replies: inputs.link.self_replies,
            labeled,
            annotated_without_majority: pairs.len() - labeled - unannotated,
            unannotated,
        },
    )?;
    w.finish()
}

/// Labelled replies to augment, optionally a seeded subset, ordered by id.
fn augment_items(config: &RunConfig, labeled: &[(LinkedPair, BeliefLabel)]) -> Vec<(TweetRecord, BeliefLabel)> {
    let mut items: Vec<(TweetRecord, BeliefLabel)> = labeled.iter().map(|(p, l)| (p.response.clone(), *l)).collect();
    if let Some(n) = config.augment_sample {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        items.shuffle(&mut rng);
        items.truncate(n);
        items.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    }
    items
}

fn run_augmentation(config: &RunConfig, items: &[(TweetRecord, BeliefLabel)], exec: Exec) -> Result<FilterOutcome> {
    let table = EmbeddingTable::load(config.embeddings_path()?)?;
    let lex = lexicon(config)?;
    let cfg = AugmentConfig { neighbors: config.neighbors, tolerance: config.tolerance };
    Ok(augment_batch(items, cfg, &table, &lex, exec)?)
}

#[derive(Serialize)]
struct AugmentSummary {
    originals: usize,
    retained: usize,
    rejected: usize,
}

fn augment(config: &RunConfig, out: &Path, exec: Exec) -> Result<Vec<PathBuf>> {
    let inputs = Inputs::load(config)?;
    let items = augment_items(config, &inputs.labeled());
    let outcome = run_augmentation(config, &items, exec)?;
    let mut w = ArtifactWriter::new(out, "augment", config)?;
    w.write_jsonl("augmented.jsonl", &outcome.retained)?;
    w.write_jsonl("augment_rejections.jsonl", &outcome.rejected)?;
    w.write_json(
        "augment.json",
        &AugmentSummary { originals: items.len(), retained: outcome.retained.len(), rejected: outcome.rejected.len() },
    )?;
    w.finish()
}

#[derive(Serialize)]
struct ModelDoc<'a> {
    model: &'a BeliefModel,
}

#[derive(Serialize)]
struct EvalDoc {
    train_originals: usize,
    train_augmented: usize,
    test: usize,
    report: EvalReport,
}

fn train_model(config: &RunConfig, out: &Path, exec: Exec) -> Result<Vec<PathBuf>> {
    let inputs = Inputs::load(config)?;
    let labeled = inputs.labeled();
    let labels: Vec<BeliefLabel> = labeled.iter().map(|(_, l)| *l).collect();
    let (train_idx, test_idx) = stratified_split(&labels, config.train_split, config.seed);
    if test_idx.is_empty() {
        bail!("the test split is empty; the corpus has too few labelled replies");
    }
    let train_items: Vec<(TweetRecord, BeliefLabel)> =
        train_idx.iter().map(|&i| (labeled[i].0.response.clone(), labels[i])).collect();
    let augmented: Vec<AugmentedVariant> = if config.embeddings.is_some() {
        run_augmentation(config, &train_items, exec)?.retained
    } else {
        Vec::new()
    };

    let norm = normalizer(config)?;
    let mut docs: Vec<Vec<String>> = train_items.iter().map(|(t, _)| norm.tokens(&t.text)).collect();
    let mut ys: Vec<BeliefLabel> = train_items.iter().map(|(_, l)| *l).collect();
    docs.extend(augmented.iter().map(|v| norm.tokens(&v.text)));
    ys.extend(augmented.iter().map(|v| v.label));

    let vocab = TfidfVocabulary::fit(&docs, config.ngram_min, config.ngram_max)?;
    let xs: Vec<SparseVector> = docs.iter().map(|d| vocab.vectorize(d)).collect();
    let model = train(vocab, &xs, &ys, &config.train_config())?;

    let test_x: Vec<SparseVector> =
        test_idx.iter().map(|&i| model.vocabulary.vectorize(&norm.tokens(&labeled[i].0.response.text))).collect();
    let test_y: Vec<BeliefLabel> = test_idx.iter().map(|&i| labels[i]).collect();
    let report = evaluate(&model, &test_x, &test_y, exec)?;

    let mut w = ArtifactWriter::new(out, "train", config)?;
    w.write_json("model.json", &ModelDoc { model: &model })?;
    w.write_json(
        "eval.json",
        &EvalDoc { train_originals: train_items.len(), train_augmented: augmented.len(), test: test_idx.len(), report },
    )?;
    w.finish()
}

#[derive(Serialize)]
struct PredictionRow<'a> {
    response_id: &'a str,
    source_id: &'a str,
    label: BeliefLabel,
    decision: f64,
}

fn predict(config: &RunConfig, out: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let model_path = opts.model.clone().unwrap_or_else(|| out.join("model.json"));
    let model: BeliefModel = read_field(&model_path, "model")?;
    model.validate()?;
    let inputs = Inputs::load(config)?;
    let norm = normalizer(config)?;
    let targets: Vec<&LinkedPair> = inputs.link.pairs.iter().filter(|p| p.response.belief_label().is_none()).collect();
    let xs: Vec<SparseVector> = targets.iter().map(|p| model.vocabulary.vectorize(&norm.tokens(&p.response.text))).collect();
    let decisions = opts.exec.map(&xs, |x| model.decision(x));
    let rows: Vec<PredictionRow> = targets
        .iter()
        .zip(decisions)
        .map(|(p, d)| PredictionRow {
            response_id: &p.response.id,
            source_id: &p.source.id,
            label: if d >= 0.0 { BeliefLabel::Yes } else { BeliefLabel::No },
            decision: d,
        })
        .collect();
    let mut w = ArtifactWriter::new(out, "predict", config)?;
    w.write_jsonl("predictions.jsonl", &rows)?;
    w.finish()
}

#[derive(Serialize)]
struct LevelDoc {
    modularity: f64,
    communities: usize,
    assignment: BTreeMap<String, usize>,
}

#[derive(Serialize)]
struct PartitionDoc {
    louvain_seed: u64,
    modularity: f64,
    communities: usize,
    assignment: BTreeMap<String, usize>,
    levels: Vec<LevelDoc>,
}

#[derive(Serialize)]
struct ProfilesDoc {
    profiles: Vec<CommunityProfile>,
}

fn communities(config: &RunConfig, out: &Path, exec: Exec) -> Result<Vec<PathBuf>> {
    let inputs = Inputs::load(config)?;
    let opts = GraphOptions {
        weighting: if config.binary_weights { EdgeWeighting::Binary } else { EdgeWeighting::Multiplicity },
        keep_isolated: config.keep_isolated,
    };
    let graph = build_graph(&inputs.records, opts);
    let seeds: Vec<u64> = (0..config.louvain_runs as u64).map(|i| config.seed.wrapping_add(i)).collect();
    let (louvain_seed, partition) = louvain_best_of(&graph, &seeds, &LouvainConfig::default(), exec)?;
    let positions = layout(&graph, &LayoutConfig { iterations: config.layout_iterations, seed: config.seed }, exec);
    let profiles = profile(&graph, &partition, &inputs.records, &inputs.labeled(), config.top_hashtags);

    let names = |a: &[usize]| -> BTreeMap<String, usize> { graph.nodes().iter().cloned().zip(a.iter().copied()).collect() };
    let doc = PartitionDoc {
        louvain_seed,
        modularity: partition.modularity,
        communities: partition.community_count(),
        assignment: partition_map(&graph, &partition),
        levels: partition
            .levels
            .iter()
            .map(|l| LevelDoc {
                modularity: l.modularity,
                communities: l.assignment.iter().max().map_or(0, |m| m + 1),
                assignment: names(&l.assignment),
            })
            .collect(),
    };
    let mut w = ArtifactWriter::new(out, "communities", config)?;
    w.write_json("partition.json", &doc)?;
    w.write_text("layout.csv", &layout_csv(&graph, &positions, &partition))?;
    let dot = format!("// beliefmine communities, config {}\n{}", w.meta().config_hash, graph.to_dot());
    w.write_text("graph.dot", &dot)?;
    w.write_json("communities.json", &ProfilesDoc { profiles })?;
    w.finish()
}

#[derive(Serialize)]
struct PersuasionDoc {
    yes_sources: usize,
    no_sources: usize,
    accuracy: f64,
    n_train: usize,
    n_test: usize,
    medians: MedianPair,
    predictions: Vec<Prediction>,
}

fn persuasion(config: &RunConfig, out: &Path, exec: Exec) -> Result<Vec<PathBuf>> {
    let inputs = Inputs::load(config)?;
    let split = split_by_majority_response(&inputs.labeled())?;
    let items = split.labeled();
    let eval = evaluate_structure_classifier(&items, config.train_split, config.seed, config.distance_mode, exec)?;
    let mut w = ArtifactWriter::new(out, "persuasion", config)?;
    w.write_json(
        "persuasion.json",
        &PersuasionDoc {
            yes_sources: split.yes.len(),
            no_sources: split.no.len(),
            accuracy: eval.accuracy,
            n_train: eval.n_train,
            n_test: eval.n_test,
            medians: eval.medians,
            predictions: eval.predictions,
        },
    )?;
    if config.emit_distances {
        let texts: Vec<&str> = items.iter().map(|(p, _)| p.as_str()).collect();
        let ids: Vec<String> = items.iter().map(|(p, _)| p.origin.clone().unwrap_or_default()).collect();
        let m = distance_matrix(&texts, config.distance_mode, exec);
        let mut csv = format!("id,{}\n", ids.join(","));
        for (id, row) in ids.iter().zip(&m) {
            csv.push_str(id);
            for d in row {
                csv.push_str(&format!(",{d}"));
            }
            csv.push('\n');
        }
        w.write_text("distances.csv", &csv)?;
    }
    w.finish()
}

fn markdown_table(title: &str, rows: &[BeliefRow]) -> String {
    let mut md = format!("## {title}\n\n| Group | Yes | No | % Yes |\n|---|---:|---:|---:|\n");
    for r in rows {
        md.push_str(&format!("| {} | {} | {} | {} |\n", r.group, r.yes, r.no, r.percent_display()));
    }
    md.push('\n');
    md
}

fn report(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let inputs = Inputs::load(config)?;
    let labeled = inputs.labeled();
    let topical = belief_ratio(&labeled, mentions_covid);
    let sources = source_belief_table(&labeled, config.top_sources);
    let mut w = ArtifactWriter::new(out, "report", config)?;
    w.write_text("belief_covid.csv", &rows_to_csv(&topical))?;
    w.write_text("belief_sources.csv", &rows_to_csv(&sources))?;
    let mut md = String::from("# Belief report\n\n");
    md.push_str(&markdown_table("Belief in COVID vs. non-COVID source posts", &topical));
    md.push_str(&markdown_table(&format!("Top {} sources by labelled replies", config.top_sources), &sources));
    md.push_str(&format!("_Generated by `beliefmine report`, config {}._\n", w.meta().config_hash));
    w.write_text("report.md", &md)?;
    w.finish()
}

/// Predicted label per response id from a `predictions.jsonl` file.
pub fn read_predictions(path: &Path) -> Result<HashMap<String, BeliefLabel>> {
    let mut out = HashMap::new();
    for line in fs::read_to_string(path)?.lines().filter(|l| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line)?;
        let id = v["response_id"].as_str().context("prediction without response_id")?.to_string();
        let label: BeliefLabel = serde_json::from_value(v["label"].clone())?;
        out.insert(id, label);
    }
    Ok(out)
}
