//! Parse strings, edit distance and nearest-medoid classification.

mod distance;
mod median;
mod parser;

use thiserror::Error;

use crate::corpus::BeliefLabel;

pub use distance::{distance_matrix, edit_distance, levenshtein, token_levenshtein, tokens, DistanceMode};
pub use median::{
    classify_by_median, evaluate_structure_classifier, median_string, medoid_index, parse_of,
    split_by_majority_response, MajoritySplit, MedianPair, Prediction, StructureEval,
};
pub use parser::{shallow_parse, PosTagger, ParseString, Tree};

#[derive(Debug, Error, PartialEq)]
pub enum ParseMedianError {
    #[error("cannot parse empty text")]
    EmptyText,
    #[error("malformed parse string at byte {position}: {reason}")]
    Malformed { position: usize, reason: &'static str },
    #[error("median of an empty set")]
    EmptyInput,
    #[error("no {0} examples in the training split")]
    ClassMissing(BeliefLabel),
    #[error("the test split is empty")]
    EmptyTestSet,
    #[error("train fraction {0} must lie strictly between 0 and 1")]
    InvalidSplit(f64),
    #[error("POS lexicon line {line}: expected `word<TAB>tag`")]
    MalformedLexicon { line: usize },
}
