//! TF-IDF n-gram features and a linear max-margin belief classifier.
//!
//! Features are raw n-gram counts weighted by the smoothed idf
//! `ln((1 + N) / (1 + df)) + 1` and L2-normalised. The linear model predicts
//! `Yes` when `w·x + b >= 0`.
//!
//! Two solvers are available. [`Solver::GradientDescent`] (the default)
//! minimises the L2-regularised squared hinge loss with full-batch gradient
//! steps and backtracking, so the objective is non-increasing per epoch and
//! the result depends only on the empirical distribution of the training
//! set. [`Solver::Sgd`] is seeded stochastic subgradient descent on the plain
//! hinge loss.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::BeliefLabel;
use crate::exec::Exec;
use crate::textprep::{ngrams, TextError};

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("cannot fit a vocabulary on zero documents")]
    EmptyCorpus,
    #[error("training data needs at least one example of each class")]
    SingleClassCorpus,
    #[error("{vectors} vectors but {labels} labels")]
    LengthMismatch { vectors: usize, labels: usize },
    #[error("cannot evaluate on an empty test set")]
    EmptyTestSet,
    #[error("model weights ({weights}) do not match vocabulary size ({vocab})")]
    CorruptModel { weights: usize, vocab: usize },
    #[error(transparent)]
    Text(#[from] TextError),
}

/// Fitted n-gram vocabulary with document frequencies and idf weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfidfVocabulary {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub n_docs: usize,
    /// Terms in lexicographic order; a term's position is its index.
    pub terms: Vec<String>,
    pub df: Vec<usize>,
    pub idf: Vec<f64>,
}

pub fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

impl TfidfVocabulary {
    pub fn fit<D: AsRef<[String]>>(docs: &[D], ngram_min: usize, ngram_max: usize) -> Result<Self, ClassifierError> {
        if docs.is_empty() {
            return Err(ClassifierError::EmptyCorpus);
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in docs {
            let grams: BTreeSet<String> = ngrams(doc.as_ref(), ngram_min, ngram_max)?.into_iter().collect();
            for g in grams {
                *df.entry(g).or_default() += 1;
            }
        }
        let n_docs = docs.len();
        let (terms, df): (Vec<String>, Vec<usize>) = df.into_iter().unzip();
        let idf = df.iter().map(|&d| smoothed_idf(n_docs, d)).collect();
        Ok(TfidfVocabulary { ngram_min, ngram_max, n_docs, terms, df, idf })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn idf_of(&self, term: &str) -> Option<f64> {
        self.index_of(term).map(|i| self.idf[i])
    }

    /// L2-normalised tf-idf vector; unseen n-grams are ignored.
    pub fn vectorize<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        let grams = ngrams(tokens, self.ngram_min, self.ngram_max).expect("range validated at fit time");
        for g in grams {
            if let Some(i) = self.index_of(&g) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        let (indices, mut values): (Vec<usize>, Vec<f64>) =
            counts.into_iter().map(|(i, tf)| (i, tf * self.idf[i])).unzip();
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            values.iter_mut().for_each(|v| *v /= norm);
        }
        SparseVector { indices, values }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVector {
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.indices.iter().zip(&self.values).map(|(i, v)| dense[*i] * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    #[default]
    GradientDescent,
    Sgd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeighting {
    /// Weight each class by `n / (2 * n_class)`.
    Balanced,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub solver: Solver,
    /// Full passes over the data.
    pub epochs: usize,
    /// Initial step size.
    pub learning_rate: f64,
    /// L2 penalty on weights and bias.
    pub regularization: f64,
    pub class_weighting: ClassWeighting,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            solver: Solver::GradientDescent,
            epochs: 300,
            learning_rate: 1.0,
            regularization: 1e-3,
            class_weighting: ClassWeighting::Balanced,
            seed: 0,
        }
    }
}

/// Anything that maps a normalised token sequence to a belief label.
pub trait BeliefClassifier {
    fn predict_tokens(&self, tokens: &[String]) -> BeliefLabel;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefModel {
    pub vocabulary: TfidfVocabulary,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: TrainConfig,
    /// Objective value after each epoch.
    #[serde(default)]
    pub loss_history: Vec<f64>,
}

impl BeliefModel {
    pub fn decision(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    pub fn predict(&self, x: &SparseVector) -> BeliefLabel {
        if self.decision(x) >= 0.0 {
            BeliefLabel::Yes
        } else {
            BeliefLabel::No
        }
    }

    pub fn predict_batch(&self, xs: &[SparseVector], exec: Exec) -> Vec<BeliefLabel> {
        exec.map(xs, |x| self.predict(x))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.weights.len() != self.vocabulary.len() {
            return Err(ClassifierError::CorruptModel {
                weights: self.weights.len(),
                vocab: self.vocabulary.len(),
            });
        }
        Ok(())
    }
}

impl BeliefClassifier for BeliefModel {
    fn predict_tokens(&self, tokens: &[String]) -> BeliefLabel {
        self.predict(&self.vocabulary.vectorize(tokens))
    }
}

fn class_weights(labels: &[BeliefLabel], scheme: ClassWeighting) -> (f64, f64) {
    let yes = labels.iter().filter(|l| **l == BeliefLabel::Yes).count() as f64;
    let no = labels.len() as f64 - yes;
    match scheme {
        ClassWeighting::Balanced => {
            let n = labels.len() as f64;
            (n / (2.0 * yes), n / (2.0 * no))
        }
        ClassWeighting::None => (1.0, 1.0),
    }
}

/// Regularised squared hinge objective and its gradient.
struct SquaredHinge<'a> {
    xs: &'a [SparseVector],
    ys: Vec<f64>,
    cs: Vec<f64>,
    lambda: f64,
    dim: usize,
}

impl SquaredHinge<'_> {
    fn value(&self, w: &[f64], b: f64) -> f64 {
        let n = self.xs.len() as f64;
        let data: f64 = self
            .xs
            .iter()
            .zip(&self.ys)
            .zip(&self.cs)
            .map(|((x, y), c)| {
                let slack = (1.0 - y * (x.dot(w) + b)).max(0.0);
                c * slack * slack
            })
            .sum();
        let reg = w.iter().map(|v| v * v).sum::<f64>() + b * b;
        data / n + 0.5 * self.lambda * reg
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.xs.len() as f64;
        let mut gw: Vec<f64> = w.iter().map(|v| self.lambda * v).collect();
        let mut gb = self.lambda * b;
        for ((x, y), c) in self.xs.iter().zip(&self.ys).zip(&self.cs) {
            let slack = 1.0 - y * (x.dot(w) + b);
            if slack > 0.0 {
                let coef = -2.0 * c * slack * y / n;
                for (i, v) in x.indices.iter().zip(&x.values) {
                    gw[*i] += coef * v;
                }
                gb += coef;
            }
        }
        debug_assert_eq!(gw.len(), self.dim);
        (gw, gb)
    }
}

fn hinge_objective(xs: &[SparseVector], ys: &[f64], cs: &[f64], lambda: f64, w: &[f64], b: f64) -> f64 {
    let n = xs.len() as f64;
    let data: f64 = xs
        .iter()
        .zip(ys)
        .zip(cs)
        .map(|((x, y), c)| c * (1.0 - y * (x.dot(w) + b)).max(0.0))
        .sum();
    data / n + 0.5 * lambda * (w.iter().map(|v| v * v).sum::<f64>() + b * b)
}

/// Fits a linear belief model on pre-vectorised documents.
pub fn train(
    vocabulary: TfidfVocabulary,
    vectors: &[SparseVector],
    labels: &[BeliefLabel],
    config: &TrainConfig,
) -> Result<BeliefModel, ClassifierError> {
    if vectors.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch { vectors: vectors.len(), labels: labels.len() });
    }
    let yes = labels.iter().filter(|l| **l == BeliefLabel::Yes).count();
    if yes == 0 || yes == labels.len() {
        return Err(ClassifierError::SingleClassCorpus);
    }
    let (c_yes, c_no) = class_weights(labels, config.class_weighting);
    let ys: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let cs: Vec<f64> = labels
        .iter()
        .map(|l| if *l == BeliefLabel::Yes { c_yes } else { c_no })
        .collect();
    let dim = vocabulary.len();
    let (weights, bias, loss_history) = match config.solver {
        Solver::GradientDescent => {
            let objective = SquaredHinge { xs: vectors, ys, cs, lambda: config.regularization, dim };
            gradient_descent(&objective, config)
        }
        Solver::Sgd => sgd(vectors, &ys, &cs, dim, config),
    };
    Ok(BeliefModel { vocabulary, weights, bias, config: config.clone(), loss_history })
}

fn gradient_descent(f: &SquaredHinge<'_>, config: &TrainConfig) -> (Vec<f64>, f64, Vec<f64>) {
    const ARMIJO: f64 = 1e-4;
    let mut w = vec![0.0; f.dim];
    let mut b = 0.0;
    let mut loss = f.value(&w, b);
    let mut step = config.learning_rate;
    let mut history = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let (gw, gb) = f.gradient(&w, b);
        let gnorm2 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
        if gnorm2 < 1e-20 {
            history.push(loss);
            break;
        }
        // Backtracking line search; a rejected step leaves the iterate alone,
        // so the objective can only go down.
        let mut accepted = false;
        for _ in 0..60 {
            let cand_w: Vec<f64> = w.iter().zip(&gw).map(|(wi, gi)| wi - step * gi).collect();
            let cand_b = b - step * gb;
            let cand = f.value(&cand_w, cand_b);
            if cand <= loss - ARMIJO * step * gnorm2 {
                w = cand_w;
                b = cand_b;
                loss = cand;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        history.push(loss);
        if !accepted {
            break;
        }
        step *= 2.0;
    }
    (w, b, history)
}

fn sgd(xs: &[SparseVector], ys: &[f64], cs: &[f64], dim: usize, config: &TrainConfig) -> (Vec<f64>, f64, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let lambda = config.regularization;
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut t = 0.0;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = config.learning_rate / (1.0 + config.learning_rate * lambda * t);
            t += 1.0;
            let margin = ys[i] * (xs[i].dot(&w) + b);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            b *= shrink;
            if margin < 1.0 {
                let step = eta * cs[i] * ys[i];
                for (j, v) in xs[i].indices.iter().zip(&xs[i].values) {
                    w[*j] += step * v;
                }
                b += step;
            }
        }
        history.push(hinge_objective(xs, ys, cs, lambda, &w, b));
    }
    (w, b, history)
}

/// Confusion counts with `Yes` as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_pairs(truth: &[BeliefLabel], predicted: &[BeliefLabel]) -> Self {
        let mut c = Confusion::default();
        for (t, p) in truth.iter().zip(predicted) {
            match (t, p) {
                (BeliefLabel::Yes, BeliefLabel::Yes) => c.tp += 1,
                (BeliefLabel::No, BeliefLabel::Yes) => c.fp += 1,
                (BeliefLabel::Yes, BeliefLabel::No) => c.fn_ += 1,
                (BeliefLabel::No, BeliefLabel::No) => c.tn += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision_macro: f64,
    pub recall_macro: f64,
    pub precision_yes: f64,
    pub recall_yes: f64,
    pub precision_no: f64,
    pub recall_no: f64,
    pub confusion: Confusion,
}

impl EvalReport {
    /// Precision of a class that was never predicted counts as 0.
    pub fn from_confusion(c: Confusion) -> Result<Self, ClassifierError> {
        if c.total() == 0 {
            return Err(ClassifierError::EmptyTestSet);
        }
        let precision_yes = ratio(c.tp, c.tp + c.fp);
        let recall_yes = ratio(c.tp, c.tp + c.fn_);
        let precision_no = ratio(c.tn, c.tn + c.fn_);
        let recall_no = ratio(c.tn, c.tn + c.fp);
        Ok(EvalReport {
            accuracy: ratio(c.tp + c.tn, c.total()),
            precision_macro: (precision_yes + precision_no) / 2.0,
            recall_macro: (recall_yes + recall_no) / 2.0,
            precision_yes,
            recall_yes,
            precision_no,
            recall_no,
            confusion: c,
        })
    }
}

pub fn evaluate(
    model: &BeliefModel,
    vectors: &[SparseVector],
    labels: &[BeliefLabel],
    exec: Exec,
) -> Result<EvalReport, ClassifierError> {
    if vectors.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch { vectors: vectors.len(), labels: labels.len() });
    }
    let predicted = model.predict_batch(vectors, exec);
    EvalReport::from_confusion(Confusion::from_pairs(labels, &predicted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use BeliefLabel::{No, Yes};

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn ab_ac() -> TfidfVocabulary {
        TfidfVocabulary::fit(&[toks(&["a", "b"]), toks(&["a", "c"])], 1, 1).unwrap()
    }

    #[test]
    fn idf_hand_values() {
        let v = ab_ac();
        assert_eq!(v.terms, ["a", "b", "c"]);
        assert_abs_diff_eq!(v.idf_of("a").unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.idf_of("b").unwrap(), 1.405_465_108_108_164_4, epsilon = 1e-12);
        assert_abs_diff_eq!(v.idf_of("c").unwrap(), 1.405_465_108_108_164_4, epsilon = 1e-12);
    }

    #[test]
    fn empty_cases() {
        assert!(matches!(TfidfVocabulary::fit::<Vec<String>>(&[], 1, 1), Err(ClassifierError::EmptyCorpus)));
        assert!(TfidfVocabulary::fit(&[Vec::<String>::new()], 1, 3).unwrap().is_empty());
        assert!(matches!(TfidfVocabulary::fit(&[toks(&["a"])], 2, 1), Err(ClassifierError::Text(_))));
    }

    #[test]
    fn duplicate_docs_double_df() {
        let one = TfidfVocabulary::fit(&[toks(&["x", "y"])], 1, 2).unwrap();
        let two = TfidfVocabulary::fit(&[toks(&["x", "y"]), toks(&["x", "y"])], 1, 2).unwrap();
        assert_eq!(one.terms, two.terms);
        assert_eq!(two.df, one.df.iter().map(|d| d * 2).collect::<Vec<_>>());
    }

    #[test]
    fn vectorize_examples() {
        let v = ab_ac();
        assert_eq!(v.vectorize(&toks(&["zzz"])).nnz(), 0);
        let x = v.vectorize(&toks(&["a"]));
        assert_eq!(x.indices, [0]);
        assert_eq!(x.values, [1.0]);
        // (1 * 1.0, 2 * 1.405...) / ||.||, normalised by hand.
        let x = v.vectorize(&toks(&["a", "b", "b"]));
        let raw = [1.0, 2.0 * (1.5f64.ln() + 1.0)];
        let norm = (raw[0] * raw[0] + raw[1] * raw[1]).sqrt();
        assert_eq!(x.indices, [0, 1]);
        assert_abs_diff_eq!(x.values[0], raw[0] / norm, epsilon = 1e-12);
        assert_abs_diff_eq!(x.values[1], raw[1] / norm, epsilon = 1e-12);
        assert_abs_diff_eq!(x.values[0], 0.335_175_743_327_926_05, epsilon = 1e-12);
    }

    #[test]
    fn separable_pair_is_learned() {
        let vocab = TfidfVocabulary::fit(&[toks(&["good"]), toks(&["bad"])], 1, 1).unwrap();
        let xs = vec![vocab.vectorize(&toks(&["good"])), vocab.vectorize(&toks(&["bad"]))];
        let ys = [Yes, No];
        for solver in [Solver::GradientDescent, Solver::Sgd] {
            let cfg = TrainConfig { solver, ..Default::default() };
            let model = train(vocab.clone(), &xs, &ys, &cfg).unwrap();
            assert_eq!(model.predict_batch(&xs, Exec::Sequential), ys, "{solver:?}");
        }
    }

    #[test]
    fn single_class_rejected() {
        let vocab = ab_ac();
        let xs = vec![vocab.vectorize(&toks(&["a"]))];
        assert!(matches!(train(vocab, &xs, &[Yes], &TrainConfig::default()), Err(ClassifierError::SingleClassCorpus)));
    }

    fn trust_corpus(n: usize, seed: u64) -> (Vec<Vec<String>>, Vec<BeliefLabel>) {
        let docs = crate::synth::separable_corpus(n, seed);
        let norm = crate::textprep::Normalizer::english();
        docs.iter().map(|(text, label)| (norm.tokens(text), *label)).unzip()
    }

    #[test]
    fn trust_rule_corpus_trains_accurately() {
        let (docs, labels) = trust_corpus(200, 11);
        let vocab = TfidfVocabulary::fit(&docs, 1, 3).unwrap();
        let xs: Vec<_> = docs.iter().map(|d| vocab.vectorize(d)).collect();
        let model = train(vocab, &xs, &labels, &TrainConfig::default()).unwrap();
        let report = evaluate(&model, &xs, &labels, Exec::Parallel).unwrap();
        assert!(report.accuracy >= 0.95, "{report:?}");
    }

    #[test]
    fn objective_never_increases() {
        let (docs, labels) = trust_corpus(120, 3);
        let vocab = TfidfVocabulary::fit(&docs, 1, 2).unwrap();
        let xs: Vec<_> = docs.iter().map(|d| vocab.vectorize(d)).collect();
        let model = train(vocab, &xs, &labels, &TrainConfig::default()).unwrap();
        assert!(!model.loss_history.is_empty());
        for w in model.loss_history.windows(2) {
            assert!(w[1] <= w[0], "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn duplicated_training_set_gives_same_decisions() {
        let (docs, labels) = trust_corpus(80, 5);
        let vocab = TfidfVocabulary::fit(&docs, 1, 3).unwrap();
        let xs: Vec<_> = docs.iter().map(|d| vocab.vectorize(d)).collect();
        let cfg = TrainConfig::default();
        let once = train(vocab.clone(), &xs, &labels, &cfg).unwrap();
        let xs2: Vec<_> = xs.iter().chain(&xs).cloned().collect();
        let labels2: Vec<_> = labels.iter().chain(&labels).copied().collect();
        let twice = train(vocab, &xs2, &labels2, &cfg).unwrap();
        for x in &xs {
            assert_abs_diff_eq!(once.decision(x), twice.decision(x), epsilon = 1e-6);
        }
    }

    #[test]
    fn sgd_is_seed_deterministic() {
        let (docs, labels) = trust_corpus(60, 9);
        let vocab = TfidfVocabulary::fit(&docs, 1, 1).unwrap();
        let xs: Vec<_> = docs.iter().map(|d| vocab.vectorize(d)).collect();
        let cfg = TrainConfig { solver: Solver::Sgd, seed: 4, epochs: 10, ..Default::default() };
        let a = train(vocab.clone(), &xs, &labels, &cfg).unwrap();
        let b = train(vocab.clone(), &xs, &labels, &cfg).unwrap();
        assert_eq!(a, b);
        let c = train(vocab, &xs, &labels, &TrainConfig { seed: 5, ..cfg }).unwrap();
        assert_ne!(a.weights, c.weights);
    }

    #[test]
    fn json_round_trip_is_bit_stable() {
        let (docs, labels) = trust_corpus(50, 2);
        let vocab = TfidfVocabulary::fit(&docs, 1, 3).unwrap();
        let xs: Vec<_> = docs.iter().map(|d| vocab.vectorize(d)).collect();
        let model = train(vocab, &xs, &labels, &TrainConfig::default()).unwrap();
        let back = BeliefModel::from_json(&model.to_json()).unwrap();
        assert_eq!(back, model);
        for x in &xs {
            assert_eq!(back.decision(x).to_bits(), model.decision(x).to_bits());
        }
    }

    #[test]
    fn eval_examples() {
        let r = EvalReport::from_confusion(Confusion { tp: 2, fp: 0, fn_: 0, tn: 2 }).unwrap();
        assert_eq!(r.accuracy, 1.0);

        let truth = [Yes, Yes, No, No];
        let r = EvalReport::from_confusion(Confusion::from_pairs(&truth, &[Yes; 4])).unwrap();
        assert_eq!(r.accuracy, 0.5);
        assert_eq!(r.recall_macro, 0.5);
        assert_eq!(r.precision_no, 0.0);

        let r = EvalReport::from_confusion(Confusion { tp: 3, fp: 1, fn_: 2, tn: 4 }).unwrap();
        assert_abs_diff_eq!(r.accuracy, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(r.precision_yes, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(r.recall_yes, 0.6, epsilon = 1e-15);

        assert!(matches!(EvalReport::from_confusion(Confusion::default()), Err(ClassifierError::EmptyTestSet)));
    }

    proptest! {
        #[test]
        fn vectors_are_unit_or_zero(words in prop::collection::vec("[a-e]", 0..12)) {
            let vocab = TfidfVocabulary::fit(&[toks(&["a", "b", "c"]), toks(&["a", "d"])], 1, 3).unwrap();
            let n = vocab.vectorize(&words).norm();
            prop_assert!(n == 0.0 || (n - 1.0).abs() <= 1e-9);
        }

        #[test]
        fn idf_decreases_with_df(n in 1usize..10_000, df in 0usize..9_999) {
            prop_assume!(df < n);
            prop_assert!(smoothed_idf(n, df) > smoothed_idf(n, df + 1));
            prop_assert!(smoothed_idf(n, df + 1) > 0.0);
        }

        #[test]
        fn positive_rescaling_keeps_labels(
            w in prop::collection::vec(-5.0f64..5.0, 4),
            b in -2.0f64..2.0,
            xs in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 4), 1..20),
            exp in -20i32..20,
        ) {
            let vocab = TfidfVocabulary::fit(&[toks(&["a", "b", "c", "d"])], 1, 1).unwrap();
            let model = BeliefModel { vocabulary: vocab, weights: w, bias: b, config: TrainConfig::default(), loss_history: vec![] };
            let c = 2f64.powi(exp);
            let scaled = BeliefModel {
                weights: model.weights.iter().map(|v| v * c).collect(),
                bias: model.bias * c,
                ..model.clone()
            };
            let xs: Vec<_> = xs.into_iter().map(|v| SparseVector { indices: (0..4).collect(), values: v }).collect();
            prop_assert_eq!(model.predict_batch(&xs, Exec::Sequential), scaled.predict_batch(&xs, Exec::Sequential));
        }

        #[test]
        fn confusion_sums_to_test_size(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..50)) {
            let lab = |b: bool| if b { Yes } else { No };
            let truth: Vec<_> = pairs.iter().map(|p| lab(p.0)).collect();
            let pred: Vec<_> = pairs.iter().map(|p| lab(p.1)).collect();
            let r = EvalReport::from_confusion(Confusion::from_pairs(&truth, &pred)).unwrap();
            prop_assert_eq!(r.confusion.total(), pairs.len());
            prop_assert_eq!(r.accuracy, (r.confusion.tp + r.confusion.tn) as f64 / pairs.len() as f64);
        }
    }
}
