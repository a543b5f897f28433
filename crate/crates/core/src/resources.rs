//! Bundled default resources. Every one of them can be replaced by a file on
//! disk through the corresponding loader.

pub const STOPWORDS_EN: &str = include_str!("../data/stopwords_en.txt");
pub const LEMMA_EXCEPTIONS: &str = include_str!("../data/lemma_exceptions.tsv");
pub const VALENCE_LEXICON: &str = include_str!("../data/valence_lexicon.tsv");
pub const SENTIMENT_RULES: &str = include_str!("../data/sentiment_rules.toml");
pub const POS_LEXICON: &str = include_str!("../data/pos_lexicon.tsv");

/// Iterates the meaningful lines of a bundled or user text resource: trimmed,
/// with blank lines and `#` comments skipped. Yields 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}
