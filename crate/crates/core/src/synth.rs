//! Seeded synthetic data: a rule-labelled text corpus, a small annotated
//! tweet/reply corpus with hashtag communities, a toy embedding table and a
//! two-class parse-string corpus with a guaranteed margin.

use chrono::{DateTime, Duration, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::augment::EmbeddingTable;
use crate::corpus::{BeliefLabel, TweetRecord, Vote};
use crate::parsemedian::{levenshtein, ParseString};

const FILLER: &[&str] = &[
    "vaccine", "mask", "hospital", "data", "study", "report", "doctor", "virus", "school", "lockdown",
    "science", "policy", "research", "nurse", "clinic", "winter", "update", "city", "county", "ward",
    "booster", "trial", "dose", "result", "expert", "journal", "guidance", "county", "patient", "case",
];

/// `n` short documents; a document is `Yes` exactly when it contains the
/// token `trust`.
pub fn separable_corpus(n: usize, seed: u64) -> Vec<(String, BeliefLabel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(5..=10);
            let mut words: Vec<&str> = (0..len).map(|_| *FILLER.choose(&mut rng).unwrap()).collect();
            let yes = rng.gen_bool(0.5);
            if yes {
                let at = rng.gen_range(0..=words.len());
                words.insert(at, "trust");
            }
            (words.join(" "), if yes { BeliefLabel::Yes } else { BeliefLabel::No })
        })
        .collect()
}

pub const FIXTURE_SIZE: usize = 200;

/// Source accounts used by [`fixture_corpus`].
pub const FIXTURE_SOURCES: &[&str] =
    &["WHO", "cdcgov", "NIH", "NEJM", "harvardmed", "StanfordMed", "YaleMed", "LSHTM", "PHE_uk", "US_FDA"];

struct Group {
    prefix: &'static str,
    tags: &'static [&'static str],
    yes_rate: f64,
    yes_lines: &'static [&'static str],
    no_lines: &'static [&'static str],
}

const GROUPS: [Group; 3] = [
    Group {
        prefix: "sci",
        tags: &["science", "maskswork", "stayhome"],
        yes_rate: 0.7,
        yes_lines: &[
            "I trust this study, keep your mask on",
            "Good to see the data, I believe the test results",
            "We trust the doctors here, stay safe",
            "Great report, I rely on this research",
        ],
        no_lines: &[
            "Not sure this test is accurate",
            "I doubt the data in this report",
        ],
    },
    Group {
        prefix: "skep",
        tags: &["plandemic", "scamdemic", "hoax"],
        yes_rate: 0.1,
        yes_lines: &["Fine, I believe this one"],
        no_lines: &[
            "This is a hoax and a scam",
            "Fake numbers again, total fraud",
            "I do not trust this, it is a lie",
            "Another scam to keep us at home",
            "The test is bogus and the report is a lie",
        ],
    },
    Group {
        prefix: "care",
        tags: &["mentalhealthmatters", "loveisessential", "selfcare"],
        yes_rate: 0.85,
        yes_lines: &[
            "Thank you, I trust you and keep going",
            "Love this, stay home and stay kind",
            "Good advice, I believe in the nurses",
        ],
        no_lines: &["I worry this is wrong"],
    },
];

const SOURCE_TEXTS: &[(&str, bool)] = &[
    ("New COVID guidance on masks in schools", true),
    ("Coronavirus cases are rising, get a test", true),
    ("Our COVID vaccine trial results are out", true),
    ("How the corona outbreak affects hospitals", true),
    ("Winter flu season advice for families", false),
    ("New research on heart health published today", false),
    ("Join our seminar on public health careers", false),
    ("Sleep and exercise matter for wellbeing", false),
];

fn at(base: DateTime<Utc>, minutes: i64) -> DateTime<Utc> {
    base + Duration::minutes(minutes)
}

fn votes_for(label: BeliefLabel, rng: &mut ChaCha8Rng) -> Vec<Vote> {
    let (main, other) = match label {
        BeliefLabel::Yes => (Vote::Yes, Vote::No),
        BeliefLabel::No => (Vote::No, Vote::Yes),
    };
    let roll: f64 = rng.gen();
    if roll < 0.08 {
        // No majority survives.
        vec![main, other, Vote::Maybe]
    } else if roll < 0.3 {
        vec![main, main, other]
    } else {
        vec![main; 3]
    }
}

/// Deterministic 200-record corpus: 40 source posts from ten tracked
/// accounts (half COVID related) and 160 replies from three hashtag
/// communities with different belief rates. About a fifth of replies carry
/// no votes; two point at posts missing from the corpus.
pub fn fixture_corpus(seed: u64) -> Vec<TweetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: DateTime<Utc> = "2020-03-01T12:00:00Z".parse().expect("valid timestamp");
    let mut out = Vec::with_capacity(FIXTURE_SIZE);
    let mut sources = Vec::new();
    for (i, handle) in FIXTURE_SOURCES.iter().enumerate() {
        for j in 0..4 {
            let (text, covid) = SOURCE_TEXTS[(i + j * 3) % SOURCE_TEXTS.len()];
            let id = format!("s{:03}", i * 4 + j);
            let tag = if covid { "covid19" } else { "publichealth" };
            out.push(TweetRecord {
                id: id.clone(),
                author: handle.to_string(),
                text: format!("{text} #{tag}"),
                created_at: at(base, (i * 4 + j) as i64 * 30),
                in_reply_to: None,
                hashtags: vec![tag.to_string()],
                votes: None,
                parse: None,
            });
            sources.push(id);
        }
    }
    let n_replies = FIXTURE_SIZE - out.len();
    for r in 0..n_replies {
        let g = &GROUPS[r % GROUPS.len()];
        let user = format!("{}_{:02}", g.prefix, rng.gen_range(0..10));
        let yes = rng.gen_bool(g.yes_rate);
        let label = if yes { BeliefLabel::Yes } else { BeliefLabel::No };
        let line = if yes { g.yes_lines } else { g.no_lines }.choose(&mut rng).unwrap();
        let mut tags = vec![*g.tags.choose(&mut rng).unwrap()];
        if rng.gen_bool(0.3) {
            tags.push(g.tags.choose(&mut rng).unwrap());
        }
        // Rare cross-community tag keeps the graph connected.
        if rng.gen_bool(0.04) {
            tags.push(GROUPS[(r + 1) % GROUPS.len()].tags[0]);
        }
        tags.sort_unstable();
        tags.dedup();
        let text = format!("{line} {}", tags.iter().map(|t| format!("#{t}")).collect::<Vec<_>>().join(" "));
        let parent = if r < 2 { format!("missing{r}") } else { sources.choose(&mut rng).unwrap().clone() };
        let votes = (!rng.gen_bool(0.2)).then(|| votes_for(label, &mut rng));
        out.push(TweetRecord {
            id: format!("r{r:03}"),
            author: user,
            text,
            created_at: at(base, 1440 + r as i64 * 7),
            in_reply_to: Some(parent),
            hashtags: tags.into_iter().map(String::from).collect(),
            votes,
            parse: None,
        });
    }
    out
}

pub const EMBEDDING_DIM: usize = 25;

const CLUSTERS: &[&[&str]] = &[
    &["keep", "stay", "remain", "maintain"],
    &["test", "exam", "check", "screen"],
    &["trust", "rely", "depend"],
    &["believe", "think", "suppose"],
    &["hoax", "scam", "fraud", "sham"],
    &["good", "great", "fine", "decent"],
    &["bad", "awful", "poor", "terrible"],
    &["mask", "covering", "facemask"],
    &["vaccine", "jab", "shot"],
    &["doctors", "physicians", "medics"],
    &["home", "house", "indoors"],
    &["data", "figures", "numbers"],
    &["report", "paper", "article"],
    &["study", "research", "analysis"],
];

/// Word clusters on near-orthogonal directions; members differ by small
/// seeded noise. Returned as `word v1 ... v25` lines.
pub fn fixture_embeddings_text(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for (c, words) in CLUSTERS.iter().enumerate() {
        let mut centre = [0.0f64; EMBEDDING_DIM];
        centre[c % EMBEDDING_DIM] = 1.0;
        centre[(c * 7 + 3) % EMBEDDING_DIM] += 0.5;
        for w in *words {
            out.push_str(w);
            for x in centre {
                let v = x + rng.gen_range(-0.08..0.08);
                out.push_str(&format!(" {v:.6}"));
            }
            out.push('\n');
        }
    }
    out
}

pub fn fixture_embeddings(seed: u64) -> EmbeddingTable {
    EmbeddingTable::parse(fixture_embeddings_text(seed).as_bytes()).expect("generated table is well formed")
}

/// Maximum edit distance of any margin-corpus string from its class base.
pub const MARGIN_RADIUS: usize = 2;
pub const MARGIN_YES_BASE: &str = "(S (NP (DT the) (JJ safe) (NN vaccine)))";
pub const MARGIN_NO_BASE: &str = "(S (VP (VB stop) (NNS lies)) (VP (VBD spread) (RB fast)))";

/// Perturbs up to [`MARGIN_RADIUS`] letters inside word atoms.
fn perturb(base: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = base.chars().collect();
    let positions: Vec<usize> = chars
        .iter()
        .enumerate()
        .filter(|(i, c)| c.is_ascii_lowercase() && chars.get(i + 1).is_some_and(|n| *n == ')' || n.is_ascii_lowercase()))
        .map(|(i, _)| i)
        .collect();
    for _ in 0..rng.gen_range(0..=MARGIN_RADIUS) {
        let p = *positions.choose(rng).unwrap();
        chars[p] = rng.gen_range(b'a'..=b'z') as char;
    }
    chars.into_iter().collect()
}

/// Two classes of parse strings, each within [`MARGIN_RADIUS`] of its base,
/// whose bases are more than `4 * MARGIN_RADIUS` apart. Any member is then
/// strictly closer to its own class medoid than to the other.
pub fn margin_parse_corpus(per_class: usize, seed: u64) -> Vec<(ParseString, BeliefLabel)> {
    debug_assert!(levenshtein(MARGIN_YES_BASE, MARGIN_NO_BASE) > 4 * MARGIN_RADIUS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * per_class);
    for i in 0..per_class {
        for (label, base, tag) in [(BeliefLabel::Yes, MARGIN_YES_BASE, "y"), (BeliefLabel::No, MARGIN_NO_BASE, "n")] {
            let text = perturb(base, &mut rng);
            out.push((ParseString { text, origin: Some(format!("{tag}{i:04}")) }, label));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{link_pairs, LinkOptions, SourceSet};
    use crate::exec::Exec;
    use crate::parsemedian::Tree;
    use std::collections::HashSet;

    #[test]
    fn separable_labels_follow_rule() {
        let docs = separable_corpus(300, 1);
        for (text, label) in &docs {
            let has = text.split(' ').any(|w| w == "trust");
            assert_eq!(has, *label == BeliefLabel::Yes);
        }
        let yes = docs.iter().filter(|d| d.1 == BeliefLabel::Yes).count();
        assert!((100..200).contains(&yes));
        assert_eq!(docs, separable_corpus(300, 1));
    }

    #[test]
    fn fixture_shape() {
        let recs = fixture_corpus(7);
        assert_eq!(recs.len(), FIXTURE_SIZE);
        let ids: HashSet<_> = recs.iter().map(|r| &r.id).collect();
        assert_eq!(ids.len(), recs.len());
        let report = link_pairs(&recs, &SourceSet::new(FIXTURE_SOURCES.iter().copied()), LinkOptions::default()).unwrap();
        assert_eq!(report.dangling, 2);
        assert_eq!(report.pairs.len(), 158);
        let labeled = report.pairs.iter().filter(|p| p.response.belief_label().is_some()).count();
        assert!(labeled > 80, "{labeled}");
        assert_eq!(recs, fixture_corpus(7));
    }

    #[test]
    fn embedding_clusters_are_nearest() {
        let table = fixture_embeddings(3);
        assert_eq!(table.dim(), EMBEDDING_DIM);
        let n = table.nearest_neighbors("keep", 3, Exec::Sequential);
        let words: HashSet<_> = n.iter().map(|n| n.word.as_str()).collect();
        assert_eq!(words, HashSet::from(["stay", "remain", "maintain"]));
    }

    #[test]
    fn margin_corpus_respects_radius() {
        let d = levenshtein(MARGIN_YES_BASE, MARGIN_NO_BASE);
        assert!(d > 4 * MARGIN_RADIUS, "{d}");
        for (p, label) in margin_parse_corpus(50, 9) {
            let base = if label == BeliefLabel::Yes { MARGIN_YES_BASE } else { MARGIN_NO_BASE };
            assert!(levenshtein(&p.text, base) <= MARGIN_RADIUS);
            Tree::parse(&p.text).unwrap();
        }
    }
}
