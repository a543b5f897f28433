//! Belief and persuasion mining over corpora of social posts and the replies
//! they receive.
//!
//! The crate is organised as a pipeline of small, mostly pure stages:
//!
//! * [`corpus`] loads line-delimited JSON records, links replies to source
//!   posts, resolves annotator votes and tabulates belief ratios.
//! * [`textprep`] normalises text into tokens and n-grams.
//! * [`sentiment`] scores text with a valence lexicon.
//! * [`augment`] expands a labelled set through embedding-neighbour
//!   substitution gated by sentiment drift.
//! * [`classifier`] fits TF-IDF features and a linear max-margin model.
//! * [`community`] builds the hashtag co-usage graph, runs Louvain, lays the
//!   graph out and profiles belief per community.
//! * [`parsemedian`] turns posts into parse strings and classifies them by
//!   their nearest class medoid under edit distance.
//!
//! Data-parallel loops go through [`exec::Exec`], which uses rayon when the
//! `parallel` feature is enabled and degrades to plain iteration otherwise.

pub mod augment;
pub mod classifier;
pub mod community;
pub mod corpus;
pub mod exec;
pub mod parsemedian;
pub mod resources;
pub mod sentiment;
pub mod synth;
pub mod textprep;

pub use exec::Exec;
