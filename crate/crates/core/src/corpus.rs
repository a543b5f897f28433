//! Corpus ingestion, reply linking, vote resolution and belief tabulation.
//!
//! A corpus is a line-delimited JSON file holding both the posts of the
//! tracked source accounts and the replies to them. Replies point at their
//! parent through `in_reply_to`; annotated replies carry raw annotator votes
//! which are collapsed into a binary [`BeliefLabel`] by strict majority.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, Utc};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("cannot resolve a label from an empty vote list")]
    EmptyVotes,
    #[error("source handle set is empty")]
    EmptySources,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One annotator's judgement of a reply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vote {
    #[serde(alias = "Yes", alias = "YES")]
    Yes,
    #[serde(alias = "No", alias = "NO")]
    No,
    #[serde(alias = "Maybe", alias = "MAYBE")]
    Maybe,
}

impl Vote {
    /// Collapses to a binary label; `Maybe` is dropped.
    pub fn belief(self) -> Option<BeliefLabel> {
        match self {
            Vote::Yes => Some(BeliefLabel::Yes),
            Vote::No => Some(BeliefLabel::No),
            Vote::Maybe => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeliefLabel {
    Yes,
    No,
}

impl BeliefLabel {
    /// +1 for `Yes`, -1 for `No`.
    pub fn sign(self) -> f64 {
        match self {
            BeliefLabel::Yes => 1.0,
            BeliefLabel::No => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BeliefLabel::Yes => "yes",
            BeliefLabel::No => "no",
        }
    }
}

impl std::fmt::Display for BeliefLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub author: String,
    pub text: String,
    pub created_at: DateTime<Utc>,
    #[serde(default)]
    pub in_reply_to: Option<String>,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub votes: Option<Vec<Vote>>,
    /// Pre-computed bracketed parse string, bypassing the built-in parser.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parse: Option<String>,
}

impl TweetRecord {
    /// Binary label resolved from the annotator votes, if any survive the
    /// majority and `Maybe` filters.
    pub fn belief_label(&self) -> Option<BeliefLabel> {
        let votes = self.votes.as_deref().filter(|v| !v.is_empty())?;
        resolve_label(votes).ok().flatten().and_then(Vote::belief)
    }
}

/// On-disk shape; `hashtags` may be absent and is then extracted from text.
#[derive(Deserialize)]
struct RawRecord {
    id: String,
    author: String,
    text: String,
    created_at: String,
    #[serde(default)]
    in_reply_to: Option<String>,
    #[serde(default)]
    hashtags: Option<Vec<String>>,
    #[serde(default)]
    votes: Option<Vec<Vote>>,
    #[serde(default)]
    parse: Option<String>,
}

impl RawRecord {
    fn validate(self, line: usize) -> Result<TweetRecord, CorpusError> {
        let bad = |reason: String| CorpusError::MalformedRecord { line, reason };
        if self.id.is_empty() {
            return Err(bad("empty id".into()));
        }
        if self.author.is_empty() {
            return Err(bad("empty author".into()));
        }
        let created_at = DateTime::parse_from_rfc3339(&self.created_at)
            .map_err(|e| bad(format!("created_at {:?}: {e}", self.created_at)))?
            .with_timezone(&Utc);
        let in_reply_to = self.in_reply_to.filter(|p| !p.is_empty());
        if in_reply_to.as_deref() == Some(self.id.as_str()) {
            return Err(bad("in_reply_to equals own id".into()));
        }
        let hashtags = match self.hashtags {
            Some(tags) => {
                let mut out = Vec::with_capacity(tags.len());
                for tag in tags {
                    if tag.is_empty() || tag.contains('#') || tag.chars().any(char::is_whitespace) {
                        return Err(bad(format!("invalid hashtag {tag:?}")));
                    }
                    out.push(tag.to_lowercase());
                }
                out
            }
            None => extract_hashtags(&self.text),
        };
        Ok(TweetRecord {
            id: self.id,
            author: self.author,
            text: self.text,
            created_at,
            in_reply_to,
            hashtags,
            votes: self.votes,
            parse: self.parse,
        })
    }
}

/// Hashtags are whitespace tokens starting with `#`. The tag runs over the
/// following alphanumeric/underscore characters, lowercased, so trailing
/// punctuation such as `#science!` is not part of it.
pub fn extract_hashtags(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|tok| tok.strip_prefix('#'))
        .map(|rest| {
            rest.chars()
                .take_while(|c| c.is_alphanumeric() || *c == '_')
                .collect::<String>()
                .to_lowercase()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<TweetRecord>, CorpusError> {
    let file = File::open(path)?;
    parse_corpus(BufReader::new(file))
}

/// Parses JSONL from any reader. Blank lines are skipped.
pub fn parse_corpus<R: BufRead>(reader: R) -> Result<Vec<TweetRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| CorpusError::MalformedRecord {
            line: line_no,
            reason: e.to_string(),
        })?;
        let record = raw.validate(line_no)?;
        if !seen.insert(record.id.clone()) {
            return Err(CorpusError::DuplicateId { line: line_no, id: record.id });
        }
        records.push(record);
    }
    Ok(records)
}

/// Case-insensitive set of tracked source handles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceSet(BTreeSet<String>);

impl SourceSet {
    pub fn new<I, S>(handles: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        SourceSet(
            handles
                .into_iter()
                .map(|h| h.as_ref().trim().trim_start_matches('@').to_lowercase())
                .filter(|h| !h.is_empty())
                .collect(),
        )
    }

    /// One handle per line; blank lines and `#` comments ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(crate::resources::content_lines(text).map(|(_, l)| l))
    }

    pub fn contains(&self, handle: &str) -> bool {
        self.0.contains(&handle.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkedPair {
    pub source: TweetRecord,
    pub response: TweetRecord,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LinkOptions {
    pub allow_self_replies: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinkReport {
    pub pairs: Vec<LinkedPair>,
    /// Replies whose parent id is absent from the corpus.
    pub dangling: usize,
    /// Self-replies skipped because the options exclude them.
    pub self_replies: usize,
}

/// Pairs every reply with its parent when the parent was posted by a tracked
/// source. Output is ordered by (source id, response id).
pub fn link_pairs(
    records: &[TweetRecord],
    sources: &SourceSet,
    opts: LinkOptions,
) -> Result<LinkReport, CorpusError> {
    if sources.is_empty() {
        return Err(CorpusError::EmptySources);
    }
    let by_id: HashMap<&str, &TweetRecord> = records.iter().map(|r| (r.id.as_str(), r)).collect();
    let mut report = LinkReport::default();
    for response in records {
        let Some(parent_id) = response.in_reply_to.as_deref() else {
            continue;
        };
        let Some(parent) = by_id.get(parent_id) else {
            report.dangling += 1;
            continue;
        };
        if !sources.contains(&parent.author) {
            continue;
        }
        if !opts.allow_self_replies && parent.author.eq_ignore_ascii_case(&response.author) {
            report.self_replies += 1;
            continue;
        }
        report.pairs.push(LinkedPair {
            source: (*parent).clone(),
            response: response.clone(),
        });
    }
    report
        .pairs
        .sort_by(|a, b| (&a.source.id, &a.response.id).cmp(&(&b.source.id, &b.response.id)));
    Ok(report)
}

/// Strict-majority vote. `None` when no value holds more than half the votes.
pub fn resolve_label(votes: &[Vote]) -> Result<Option<Vote>, CorpusError> {
    if votes.is_empty() {
        return Err(CorpusError::EmptyVotes);
    }
    let mut counts = [0usize; 3];
    for v in votes {
        counts[*v as usize] += 1;
    }
    let winner = [Vote::Yes, Vote::No, Vote::Maybe]
        .into_iter()
        .find(|v| counts[*v as usize] * 2 > votes.len());
    Ok(winner)
}

/// Draws up to `per_source` replies uniformly at random for each source post,
/// the way an annotation batch is assembled. Output keeps link order.
pub fn sample_responses(pairs: &[LinkedPair], per_source: usize, seed: u64) -> Vec<LinkedPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, p) in pairs.iter().enumerate() {
        groups.entry(&p.source.id).or_default().push(i);
    }
    let mut keep = Vec::new();
    for idxs in groups.values() {
        let mut idxs = idxs.clone();
        idxs.shuffle(&mut rng);
        idxs.truncate(per_source);
        keep.extend(idxs);
    }
    keep.sort_unstable();
    keep.into_iter().map(|i| pairs[i].clone()).collect()
}

/// Seeded split stratified by label: `round(train_fraction * n_c)` members of
/// each class go to train, the rest to test. Both index lists are ascending.
pub fn stratified_split(labels: &[BeliefLabel], train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [BeliefLabel::Yes, BeliefLabel::No] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        let k = ((train_fraction * members.len() as f64).round() as usize).min(members.len());
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Yes/No counts for one reporting group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeliefRow {
    pub group: String,
    pub yes: usize,
    pub no: usize,
}

impl BeliefRow {
    pub fn total(&self) -> usize {
        self.yes + self.no
    }

    /// Percentage of Yes among labelled replies; absent for an empty group.
    pub fn percent(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| 100.0 * self.yes as f64 / total as f64)
    }

    /// One decimal place, empty when the percentage is absent.
    pub fn percent_display(&self) -> String {
        self.percent().map(|p| format!("{p:.1}")).unwrap_or_default()
    }

    fn add(&mut self, label: BeliefLabel) {
        match label {
            BeliefLabel::Yes => self.yes += 1,
            BeliefLabel::No => self.no += 1,
        }
    }
}

pub const COVID_GROUP: &str = "COVID";
pub const NON_COVID_GROUP: &str = "Non-COVID";

/// Default topical split: the post mentions "covid" or "corona", any case.
pub fn mentions_covid(tweet: &TweetRecord) -> bool {
    let text = tweet.text.to_lowercase();
    text.contains("covid") || text.contains("corona")
}

/// Splits labelled pairs by a predicate over the *source* post. The first row
/// holds matching pairs, the second the rest.
pub fn belief_ratio<F>(labeled: &[(LinkedPair, BeliefLabel)], split: F) -> [BeliefRow; 2]
where
    F: Fn(&TweetRecord) -> bool,
{
    let mut rows = [
        BeliefRow { group: COVID_GROUP.into(), ..Default::default() },
        BeliefRow { group: NON_COVID_GROUP.into(), ..Default::default() },
    ];
    for (pair, label) in labeled {
        let row = if split(&pair.source) { 0 } else { 1 };
        rows[row].add(*label);
    }
    rows
}

/// Per-source belief counts, sorted by total replies descending with ties
/// broken by handle, truncated to `top_k`.
pub fn source_belief_table(labeled: &[(LinkedPair, BeliefLabel)], top_k: usize) -> Vec<BeliefRow> {
    let mut by_source: BTreeMap<&str, BeliefRow> = BTreeMap::new();
    for (pair, label) in labeled {
        by_source
            .entry(&pair.source.author)
            .or_insert_with(|| BeliefRow { group: pair.source.author.clone(), ..Default::default() })
            .add(*label);
    }
    let mut rows: Vec<BeliefRow> = by_source.into_values().collect();
    rows.sort_by(|a, b| b.total().cmp(&a.total()).then_with(|| a.group.cmp(&b.group)));
    rows.truncate(top_k);
    rows
}

/// CSV with header `group,yes,no,percent`.
pub fn rows_to_csv(rows: &[BeliefRow]) -> String {
    let mut out = String::from("group,yes,no,percent\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", csv_field(&r.group), r.yes, r.no, r.percent_display()));
    }
    out
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
