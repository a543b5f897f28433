//! Text normalisation and n-gram extraction.
//!
//! The normalisation pipeline runs in a fixed order: lowercase, drop URLs,
//! drop @mentions, strip `#` from hashtags, delete punctuation, split on
//! whitespace, drop stopwords, lemmatise. Lemmatisation is a small suffix rule
//! table backed by an exceptions lexicon.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::resources::{self, content_lines};

#[derive(Debug, Error)]
pub enum TextError {
    #[error("invalid n-gram range {min}..={max}")]
    InvalidRange { min: usize, max: usize },
    #[error("line {line}: expected `word<TAB>lemma`")]
    MalformedLexicon { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Normalised tokens of one record.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSeq {
    pub tokens: Vec<String>,
    pub provenance: String,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// One word per line. Entries pass through the same punctuation removal as
    /// text, so `don't` also matches the token `dont`.
    pub fn parse(text: &str) -> Self {
        let mut set = HashSet::new();
        for (_, line) in content_lines(text) {
            let word = line.to_lowercase();
            let stripped = strip_punctuation(&word);
            set.insert(word);
            if !stripped.is_empty() {
                set.insert(stripped);
            }
        }
        Stopwords(set)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TextError> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn english() -> Self {
        Self::parse(resources::STOPWORDS_EN)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(Into::into).collect())
    }
}

/// Suffix-rule lemmatiser with an exceptions lexicon consulted first.
#[derive(Clone, Debug, Default)]
pub struct Lemmatizer {
    exceptions: HashMap<String, String>,
}

impl Lemmatizer {
    pub fn parse(text: &str) -> Result<Self, TextError> {
        let mut exceptions = HashMap::new();
        for (line, row) in content_lines(text) {
            let mut cols = row.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(w), Some(l), None) if !w.trim().is_empty() && !l.trim().is_empty() => {
                    exceptions.insert(w.trim().to_lowercase(), l.trim().to_lowercase());
                }
                _ => return Err(TextError::MalformedLexicon { line }),
            }
        }
        Ok(Lemmatizer { exceptions })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TextError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn bundled() -> Self {
        Self::parse(resources::LEMMA_EXCEPTIONS).expect("bundled lemma exceptions are well formed")
    }

    /// Applies the rules until the word stops changing, which makes the
    /// lemmatiser idempotent (`singings` -> `singing` -> `sing`).
    pub fn lemmatize(&self, word: &str) -> String {
        let mut current = word.to_string();
        for _ in 0..8 {
            let next = self.step(&current);
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    fn step(&self, word: &str) -> String {
        if let Some(lemma) = self.exceptions.get(word) {
            return lemma.clone();
        }
        if !word.is_ascii() || word.len() <= 3 {
            return word.to_string();
        }
        let n = word.len();
        if word.ends_with("ies") && n > 4 {
            return format!("{}y", &word[..n - 3]);
        }
        if word.ends_with("sses") {
            return word[..n - 2].to_string();
        }
        if ["ches", "shes", "xes", "zes"].iter().any(|s| word.ends_with(s)) {
            return word[..n - 2].to_string();
        }
        if word.ends_with('s') && !["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
            return word[..n - 1].to_string();
        }
        for suffix in ["ing", "ed"] {
            if let Some(stem) = word.strip_suffix(suffix) {
                if stem.len() >= 3 && stem.chars().any(is_vowel) {
                    return undouble(stem);
                }
            }
        }
        word.to_string()
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// `stopp` -> `stop`, `runn` -> `run`; `ll`, `ss`, `zz` stay (`fill`, `kiss`).
fn undouble(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 2 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1] as char) && !matches!(b[n - 1], b'l' | b's' | b'z')
    {
        stem[..n - 1].to_string()
    } else {
        stem.to_string()
    }
}

/// Deletes every character that is neither alphanumeric nor whitespace.
pub fn strip_punctuation(s: &str) -> String {
    s.chars().filter(|c| c.is_alphanumeric() || c.is_whitespace()).collect()
}

/// A whitespace token is a URL when, ignoring leading punctuation, it starts
/// with `scheme://` or is a `t.co/` short link.
pub fn is_url(token: &str) -> bool {
    let t = token.trim_start_matches(|c: char| !c.is_alphanumeric());
    if t.starts_with("t.co/") || t.starts_with("www.") {
        return true;
    }
    match t.find("://") {
        Some(i) if i > 0 && t.len() > i + 3 => t[..i].chars().all(|c| c.is_ascii_alphanumeric() || c == '+' || c == '-' || c == '.'),
        _ => false,
    }
}

/// Leading punctuation other than `@` and `#` is ignored, so `-@DrTedros`
/// counts as a mention.
fn trim_lead(token: &str) -> &str {
    token.trim_start_matches(|c: char| !c.is_alphanumeric() && c != '@' && c != '#')
}

pub fn is_mention(token: &str) -> bool {
    trim_lead(token).starts_with('@')
}

/// Stopwords plus lemmatiser; the reusable half of [`normalize`].
#[derive(Clone, Debug, Default)]
pub struct Normalizer {
    pub stopwords: Stopwords,
    pub lemmatizer: Lemmatizer,
}

impl Normalizer {
    pub fn new(stopwords: Stopwords, lemmatizer: Lemmatizer) -> Self {
        Normalizer { stopwords, lemmatizer }
    }

    /// English stopwords and the bundled exceptions lexicon.
    pub fn english() -> Self {
        Self::new(Stopwords::english(), Lemmatizer::bundled())
    }

    pub fn tokens(&self, text: &str) -> Vec<String> {
        let lowered = text.to_lowercase();
        let mut out = Vec::new();
        for raw in lowered.split_whitespace() {
            if is_url(raw) || is_mention(raw) {
                continue;
            }
            let raw = trim_lead(raw);
            let raw = raw.strip_prefix('#').unwrap_or(raw);
            for word in strip_punctuation(raw).split_whitespace() {
                if self.stopwords.contains(word) {
                    continue;
                }
                let lemma = self.lemmatizer.lemmatize(word);
                if !self.stopwords.contains(&lemma) {
                    out.push(lemma);
                }
            }
        }
        out
    }

    pub fn normalize(&self, text: &str, provenance: &str) -> TokenSeq {
        TokenSeq { tokens: self.tokens(text), provenance: provenance.to_string() }
    }
}

/// Normalises `text` with the given stopwords and the bundled lemmatiser.
pub fn normalize(text: &str, stopwords: &Stopwords) -> TokenSeq {
    let n = Normalizer::new(stopwords.clone(), Lemmatizer::bundled());
    n.normalize(text, "")
}

/// All contiguous n-grams for n in `min..=max`, joined by single spaces,
/// ordered by n then position.
pub fn ngrams<S: AsRef<str>>(tokens: &[S], min: usize, max: usize) -> Result<Vec<String>, TextError> {
    if min == 0 || min > max {
        return Err(TextError::InvalidRange { min, max });
    }
    let mut out = Vec::new();
    for n in min..=max.min(tokens.len()) {
        for window in tokens.windows(n) {
            let mut gram = String::from(window[0].as_ref());
            for t in &window[1..] {
                gram.push(' ');
                gram.push_str(t.as_ref());
            }
            out.push(gram);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text() {
        assert!(normalize("", &Stopwords::empty()).tokens.is_empty());
    }

    #[test]
    fn mention_url_hashtag_pipeline() {
        let t = normalize("@CDCgov Masks WORK! https://t.co/abc #science", &Stopwords::empty());
        assert_eq!(t.tokens, ["mask", "work", "science"]);
    }

    #[test]
    fn augmented_table_sentence() {
        let t = normalize("It is hard to keep up with the guide lines.", &Stopwords::english());
        assert_eq!(t.tokens, ["hard", "keep", "guide", "line"]);
    }

    #[test]
    fn url_detection() {
        assert!(is_url("https://example.org/x"));
        assert!(is_url("(https://t.co/ul1BZiBTtd)"));
        assert!(is_url("t.co/abc"));
        assert!(!is_url("covid://"));
        assert!(is_url("covid://x"));
        assert!(!is_url("ratio:1"));
        assert!(!is_url("://x"));
        assert!(is_mention("-@DrTedros"));
    }

    #[test]
    fn contractions_hit_stopwords() {
        let t = normalize("It's clear we don't know", &Stopwords::english());
        assert_eq!(t.tokens, ["clear", "know"]);
    }

    #[test]
    fn suffix_rules() {
        let l = Lemmatizer::default();
        let cases = [
            ("studies", "study"),
            ("glasses", "glass"),
            ("watches", "watch"),
            ("boxes", "box"),
            ("cases", "case"),
            ("virus", "virus"),
            ("analysis", "analysis"),
            ("running", "run"),
            ("stopped", "stop"),
            ("tested", "test"),
            ("filled", "fill"),
            ("thing", "thing"),
            ("need", "need"),
            ("singings", "sing"),
            ("gas", "gas"),
        ];
        for (word, lemma) in cases {
            assert_eq!(l.lemmatize(word), lemma, "{word}");
        }
    }

    #[test]
    fn exceptions_take_precedence() {
        let l = Lemmatizer::bundled();
        assert_eq!(l.lemmatize("making"), "make");
        assert_eq!(l.lemmatize("news"), "news");
        assert_eq!(l.lemmatize("children"), "child");
        let custom = Lemmatizer::parse("geese\tgoose\n").unwrap();
        assert_eq!(custom.lemmatize("geese"), "goose");
        assert!(matches!(Lemmatizer::parse("bad line"), Err(TextError::MalformedLexicon { line: 1 })));
    }

    #[test]
    fn ngram_examples() {
        let toks = ["a", "b", "c"];
        let mut grams = ngrams(&toks, 1, 3).unwrap();
        grams.sort();
        assert_eq!(grams, ["a", "a b", "a b c", "b", "b c", "c"]);
        assert!(ngrams::<&str>(&[], 1, 3).unwrap().is_empty());
        assert!(ngrams(&["x"], 2, 3).unwrap().is_empty());
        assert!(matches!(ngrams(&toks, 0, 2), Err(TextError::InvalidRange { .. })));
        assert!(matches!(ngrams(&toks, 3, 2), Err(TextError::InvalidRange { .. })));
    }

    fn tweetish() -> impl Strategy<Value = String> {
        let piece = prop_oneof![
            "[a-zA-Z]{1,9}",
            "[a-z]{2,6}(s|es|ies|ing|ed|ings)",
            Just("@someone".to_string()),
            Just("#Hashtag".to_string()),
            Just("https://t.co/Xy1".to_string()),
            Just("it's".to_string()),
            Just("-@DrTedros".to_string()),
            "[!?.,;:()'\"]{1,3}",
            "[0-9]{1,4}",
            "[a-z]{1,4}[-/.][a-z]{1,4}",
            "[ÀÉİßÖ][a-z]{0,3}",
        ];
        prop::collection::vec(piece, 0..14).prop_map(|v| v.join(" "))
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(text in tweetish()) {
            let norm = Normalizer::english();
            let once = norm.tokens(&text);
            let twice = norm.tokens(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn tokens_are_clean(text in tweetish()) {
            let norm = Normalizer::english();
            for tok in norm.tokens(&text) {
                prop_assert!(!tok.is_empty());
                prop_assert!(!tok.contains(['#', '@']) && !tok.chars().any(char::is_whitespace));
                prop_assert!(!tok.contains("://"));
                prop_assert!(!norm.stopwords.contains(&tok));
            }
        }

        #[test]
        fn ngram_counts(len in 0usize..12, min in 1usize..5, extra in 0usize..5) {
            let toks: Vec<String> = (0..len).map(|i| format!("t{i}")).collect();
            let max = min + extra;
            let grams = ngrams(&toks, min, max).unwrap();
            let expected: usize = (min..=max).map(|n| (len + 1).saturating_sub(n)).sum();
            prop_assert_eq!(grams.len(), expected);
            prop_assert_eq!(ngrams(&toks, 1, 1).unwrap().len(), len);
        }
    }
}
