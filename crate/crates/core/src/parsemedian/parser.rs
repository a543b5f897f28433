//! Deterministic shallow parser and a bracket reader for its output.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ParseMedianError;
use crate::resources::{self, content_lines};

/// Bracketed constituency string such as `(S (NP (DT the) (NN cat)))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseString {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

impl ParseString {
    /// Validates that `text` reads as a single bracketed tree.
    pub fn new(text: impl Into<String>, origin: Option<String>) -> Result<Self, ParseMedianError> {
        let text = text.into();
        Tree::parse(&text)?;
        Ok(ParseString { text, origin })
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl fmt::Display for ParseString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    Atom(String),
    Node { label: String, children: Vec<Tree> },
}

impl Tree {
    pub fn parse(text: &str) -> Result<Tree, ParseMedianError> {
        let mut reader = Reader { src: text.as_bytes(), pos: 0 };
        reader.skip_ws();
        if reader.pos == text.len() {
            return Err(ParseMedianError::EmptyText);
        }
        let tree = reader.node()?;
        reader.skip_ws();
        if reader.pos != text.len() {
            return Err(reader.err("trailing input"));
        }
        Ok(tree)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Atom(a) => f.write_str(a),
            Tree::Node { label, children } => {
                write!(f, "({label}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn err(&self, reason: &'static str) -> ParseMedianError {
        ParseMedianError::Malformed { position: self.pos, reason }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<String, ParseMedianError> {
        let start = self.pos;
        while self.pos < self.src.len() && !matches!(self.src[self.pos], b'(' | b')') && !self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an atom"));
        }
        // Atoms end on ASCII delimiters, so the slice is valid UTF-8.
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn node(&mut self) -> Result<Tree, ParseMedianError> {
        if self.src.get(self.pos) != Some(&b'(') {
            return Err(self.err("expected '('"));
        }
        self.pos += 1;
        self.skip_ws();
        let label = self.atom()?;
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            match self.src.get(self.pos) {
                None => return Err(self.err("unbalanced parentheses")),
                Some(b')') => {
                    self.pos += 1;
                    return Ok(Tree::Node { label, children });
                }
                Some(b'(') => children.push(self.node()?),
                Some(_) => children.push(Tree::Atom(self.atom()?)),
            }
        }
    }
}

/// Lexicon lookup with suffix-rule fallback.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosTagger {
    lexicon: HashMap<String, String>,
}

impl Default for PosTagger {
    fn default() -> Self {
        Self::parse(resources::POS_LEXICON).expect("bundled POS lexicon is well formed")
    }
}

impl PosTagger {
    pub fn parse(table: &str) -> Result<Self, ParseMedianError> {
        let mut lexicon = HashMap::new();
        for (line, row) in content_lines(table) {
            let mut cols = row.split('\t');
            let (Some(w), Some(t), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(ParseMedianError::MalformedLexicon { line });
            };
            lexicon.insert(w.trim().to_lowercase(), t.trim().to_string());
        }
        Ok(PosTagger { lexicon })
    }

    pub fn from_entries<I, S, T>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        PosTagger { lexicon: entries.into_iter().map(|(w, t)| (w.into().to_lowercase(), t.into())).collect() }
    }

    pub fn tag(&self, token: &str) -> String {
        if let Some(t) = punct_tag(token) {
            return t.to_string();
        }
        let lower = token.to_lowercase();
        if let Some(t) = self.lexicon.get(&lower) {
            return t.clone();
        }
        suffix_tag(&lower).to_string()
    }

    /// Shallow constituency string for `text`.
    pub fn parse_text(&self, text: &str) -> Result<ParseString, ParseMedianError> {
        let toks = tokenize(text);
        if toks.is_empty() {
            return Err(ParseMedianError::EmptyText);
        }
        let tagged: Vec<(String, String)> = toks.into_iter().map(|w| (self.tag(&w), escape(&w))).collect();
        let mut out = String::from("(S");
        for chunk in chunk(&tagged) {
            out.push(' ');
            out.push_str(&chunk);
        }
        out.push(')');
        Ok(ParseString { text: out, origin: None })
    }
}

/// [`PosTagger::parse_text`] with the bundled lexicon.
pub fn shallow_parse(text: &str) -> Result<ParseString, ParseMedianError> {
    thread_local! {
        static TAGGER: PosTagger = PosTagger::default();
    }
    TAGGER.with(|t| t.parse_text(text))
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !matches!(c, '#' | '@' | '_' | '\'')
}

/// Whitespace tokens with leading and trailing punctuation split off one
/// character at a time.
fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let start = chunk.find(|c: char| !is_punct(c)).unwrap_or(chunk.len());
        let end = chunk.rfind(|c: char| !is_punct(c)).map_or(start, |i| i + chunk[i..].chars().next().unwrap().len_utf8());
        out.extend(chunk[..start].chars().map(String::from));
        if start < end {
            out.push(chunk[start..end].to_string());
        }
        out.extend(chunk[end.max(start)..].chars().map(String::from));
    }
    out
}

fn escape(word: &str) -> String {
    match word {
        "(" => "-LRB-".into(),
        ")" => "-RRB-".into(),
        _ => word.replace('(', "-LRB-").replace(')', "-RRB-"),
    }
}

fn punct_tag(token: &str) -> Option<&'static str> {
    let mut chars = token.chars();
    let c = chars.next()?;
    if chars.next().is_some() || !is_punct(c) {
        return None;
    }
    Some(match c {
        '.' | '!' | '?' => ".",
        ',' => ",",
        ':' | ';' | '-' | '…' => ":",
        '(' | '[' | '{' => "-LRB-",
        ')' | ']' | '}' => "-RRB-",
        _ => "SYM",
    })
}

fn suffix_tag(word: &str) -> &'static str {
    if word.chars().any(|c| c.is_ascii_digit()) && word.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '%')) {
        return "CD";
    }
    let long = word.chars().count() > 3;
    if long && word.ends_with("ly") {
        "RB"
    } else if long && word.ends_with("ing") {
        "VBG"
    } else if long && word.ends_with("ed") {
        "VBD"
    } else if ["ous", "ful", "able", "ible", "al", "ive", "ic"].iter().any(|s| long && word.ends_with(s)) {
        "JJ"
    } else if long && word.ends_with('s') && !["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
        "NNS"
    } else {
        "NN"
    }
}

fn is_noun(t: &str) -> bool {
    matches!(t, "NN" | "NNS" | "NNP" | "NNPS" | "PRP" | "CD")
}

fn is_adj(t: &str) -> bool {
    matches!(t, "JJ" | "JJR" | "JJS" | "PRP$")
}

fn is_verb(t: &str) -> bool {
    matches!(t, "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ")
}

fn leaf((tag, word): &(String, String)) -> String {
    format!("({tag} {word})")
}

/// Length of the NP starting at `i`: `DT? JJ* NN+`.
fn np_len(tagged: &[(String, String)], i: usize) -> usize {
    let mut j = i;
    if tagged.get(j).is_some_and(|(t, _)| t == "DT") {
        j += 1;
    }
    while tagged.get(j).is_some_and(|(t, _)| is_adj(t)) {
        j += 1;
    }
    let nouns = j;
    while tagged.get(j).is_some_and(|(t, _)| is_noun(t)) {
        j += 1;
    }
    if j == nouns {
        0
    } else {
        j - i
    }
}

fn np(tagged: &[(String, String)]) -> String {
    format!("(NP {})", tagged.iter().map(leaf).collect::<Vec<_>>().join(" "))
}

fn chunk(tagged: &[(String, String)]) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tagged.len() {
        let tag = tagged[i].0.as_str();
        let n = np_len(tagged, i);
        if n > 0 {
            out.push(np(&tagged[i..i + n]));
            i += n;
            continue;
        }
        if tag == "IN" {
            let n = np_len(tagged, i + 1);
            if n > 0 {
                out.push(format!("(PP {} {})", leaf(&tagged[i]), np(&tagged[i + 1..i + 1 + n])));
                i += 1 + n;
                continue;
            }
        }
        if tag == "MD" || is_verb(tag) {
            let mut j = i + 1;
            while tagged.get(j).is_some_and(|(t, _)| is_verb(t)) {
                j += 1;
            }
            out.push(format!("(VP {})", tagged[i..j].iter().map(leaf).collect::<Vec<_>>().join(" ")));
            i = j;
            continue;
        }
        out.push(leaf(&tagged[i]));
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rule_table_examples() {
        let tagger = PosTagger::from_entries([("the", "DT"), ("cat", "NN"), ("sat", "VBD")]);
        assert_eq!(tagger.parse_text("the cat sat").unwrap().text, "(S (NP (DT the) (NN cat)) (VP (VBD sat)))");
        assert_eq!(shallow_parse("virus").unwrap().text, "(S (NP (NN virus)))");
        assert_eq!(shallow_parse("").unwrap_err(), ParseMedianError::EmptyText);
        assert_eq!(shallow_parse("  \t").unwrap_err(), ParseMedianError::EmptyText);
    }

    #[test]
    fn chunks_pp_and_modal_vp() {
        let tagger = PosTagger::from_entries([
            ("can", "MD"),
            ("help", "VB"),
            ("in", "IN"),
            ("the", "DT"),
            ("crowded", "JJ"),
            ("very", "RB"),
        ]);
        let p = tagger.parse_text("Masks can help in the crowded hospitals very much.").unwrap();
        assert_eq!(
            p.text,
            "(S (NP (NNS Masks)) (VP (MD can) (VB help)) (PP (IN in) (NP (DT the) (JJ crowded) (NNS hospitals))) \
             (RB very) (NP (NN much)) (. .))"
        );
        // IN without a following NP stays bare.
        assert_eq!(tagger.parse_text("in").unwrap().text, "(S (IN in))");
    }

    #[test]
    fn suffix_rules() {
        let t = PosTagger::from_entries::<_, &str, &str>([]);
        assert_eq!(t.tag("quickly"), "RB");
        assert_eq!(t.tag("spreading"), "VBG");
        assert_eq!(t.tag("tested"), "VBD");
        assert_eq!(t.tag("vaccines"), "NNS");
        assert_eq!(t.tag("glass"), "NN");
        assert_eq!(t.tag("dangerous"), "JJ");
        assert_eq!(t.tag("2020"), "CD");
        assert_eq!(t.tag("?"), ".");
        assert_eq!(t.tag("("), "-LRB-");
        assert_eq!(t.tag("Virus"), "NN");
    }

    #[test]
    fn brackets_escaped() {
        let p = shallow_parse("(see) this").unwrap();
        assert!(p.text.starts_with("(S (-LRB- -LRB-)"), "{}", p.text);
        Tree::parse(&p.text).unwrap();
    }

    #[test]
    fn reader_rejects_malformed() {
        assert!(matches!(Tree::parse("(S (NP"), Err(ParseMedianError::Malformed { .. })));
        assert!(matches!(Tree::parse("(S) x"), Err(ParseMedianError::Malformed { .. })));
        assert!(matches!(Tree::parse("S"), Err(ParseMedianError::Malformed { .. })));
        assert_eq!(Tree::parse(""), Err(ParseMedianError::EmptyText));
        assert!(ParseString::new("(S (NP (NN x)))", None).is_ok());
    }

    proptest! {
        #[test]
        fn output_balanced_and_round_trips(text in "[a-zA-Z0-9 .,!?()#@'\\-]{0,60}") {
            match shallow_parse(&text) {
                Err(e) => prop_assert_eq!(e, ParseMedianError::EmptyText),
                Ok(p) => {
                    let mut depth = 0i64;
                    for c in p.text.chars() {
                        match c {
                            '(' => depth += 1,
                            ')' => depth -= 1,
                            _ => {}
                        }
                        prop_assert!(depth >= 0);
                    }
                    prop_assert_eq!(depth, 0);
                    let tree = Tree::parse(&p.text).unwrap();
                    prop_assert_eq!(tree.to_string(), p.text);
                }
            }
        }
    }
}
