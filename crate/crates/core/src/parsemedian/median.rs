use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{distance_matrix, shallow_parse, DistanceMode, ParseMedianError, ParseString};
use crate::corpus::{mentions_covid, stratified_split, BeliefLabel, LinkedPair, TweetRecord};
use crate::exec::Exec;

/// Index of the member with the smallest summed distance to the rest,
/// earliest index on ties.
pub fn medoid_index<S: AsRef<str> + Sync>(strings: &[S], mode: DistanceMode, exec: Exec) -> Result<usize, ParseMedianError> {
    if strings.is_empty() {
        return Err(ParseMedianError::EmptyInput);
    }
    let m = distance_matrix(strings, mode, exec);
    let sums = m.iter().map(|row| row.iter().sum::<usize>());
    let mut best = (0, usize::MAX);
    for (i, s) in sums.enumerate() {
        if s < best.1 {
            best = (i, s);
        }
    }
    Ok(best.0)
}

/// Character-level medoid of `strings`.
pub fn median_string<S: AsRef<str> + Sync>(strings: &[S]) -> Result<String, ParseMedianError> {
    let i = medoid_index(strings, DistanceMode::Char, Exec::Sequential)?;
    Ok(strings[i].as_ref().to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MedianPair {
    pub median_yes: ParseString,
    pub median_no: ParseString,
}

impl MedianPair {
    pub fn from_sets(yes: &[ParseString], no: &[ParseString], mode: DistanceMode, exec: Exec) -> Result<Self, ParseMedianError> {
        let texts = |s: &[ParseString]| s.iter().map(|p| p.text.clone()).collect::<Vec<_>>();
        let y = medoid_index(&texts(yes), mode, exec).map_err(|_| ParseMedianError::ClassMissing(BeliefLabel::Yes))?;
        let n = medoid_index(&texts(no), mode, exec).map_err(|_| ParseMedianError::ClassMissing(BeliefLabel::No))?;
        Ok(MedianPair { median_yes: yes[y].clone(), median_no: no[n].clone() })
    }

    pub fn swapped(&self) -> Self {
        MedianPair { median_yes: self.median_no.clone(), median_no: self.median_yes.clone() }
    }
}

/// Yes only when strictly closer to the Yes medoid.
pub fn classify_by_median(p: &str, medians: &MedianPair, mode: DistanceMode) -> BeliefLabel {
    let dy = mode.distance(p, medians.median_yes.as_str());
    let dn = mode.distance(p, medians.median_no.as_str());
    if dy < dn {
        BeliefLabel::Yes
    } else {
        BeliefLabel::No
    }
}

/// The post's own parse when supplied, otherwise the shallow parse of its text.
pub fn parse_of(tweet: &TweetRecord) -> Result<ParseString, ParseMedianError> {
    let mut p = match &tweet.parse {
        Some(text) => ParseString::new(text.clone(), None)?,
        None => shallow_parse(&tweet.text)?,
    };
    p.origin = Some(tweet.id.clone());
    Ok(p)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajoritySplit {
    pub yes: Vec<ParseString>,
    pub no: Vec<ParseString>,
}

impl MajoritySplit {
    pub fn labeled(&self) -> Vec<(ParseString, BeliefLabel)> {
        let yes = self.yes.iter().map(|p| (p.clone(), BeliefLabel::Yes));
        let no = self.no.iter().map(|p| (p.clone(), BeliefLabel::No));
        yes.chain(no).collect()
    }
}

/// Groups labelled replies by source post. COVID-related sources with a
/// strict Yes majority go to the Yes set, the rest to No. Sets are ordered
/// by source id.
pub fn split_by_majority_response(labeled: &[(LinkedPair, BeliefLabel)]) -> Result<MajoritySplit, ParseMedianError> {
    let mut tally: BTreeMap<&str, (&TweetRecord, usize, usize)> = BTreeMap::new();
    for (pair, label) in labeled {
        if !mentions_covid(&pair.source) {
            continue;
        }
        let e = tally.entry(&pair.source.id).or_insert((&pair.source, 0, 0));
        match label {
            BeliefLabel::Yes => e.1 += 1,
            BeliefLabel::No => e.2 += 1,
        }
    }
    let mut split = MajoritySplit::default();
    for (source, yes, no) in tally.into_values() {
        let p = parse_of(source)?;
        if yes > no {
            split.yes.push(p);
        } else {
            split.no.push(p);
        }
    }
    Ok(split)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
    pub label: BeliefLabel,
    pub predicted: BeliefLabel,
    pub distance_yes: usize,
    pub distance_no: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureEval {
    pub accuracy: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub medians: MedianPair,
    pub predictions: Vec<Prediction>,
}

/// Seeded split stratified by class: `round(train_fraction * n_c)` items of
/// each class train, the rest test. Medoids come from the train split only.
pub fn evaluate_structure_classifier(
    items: &[(ParseString, BeliefLabel)],
    train_fraction: f64,
    seed: u64,
    mode: DistanceMode,
    exec: Exec,
) -> Result<StructureEval, ParseMedianError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(ParseMedianError::InvalidSplit(train_fraction));
    }
    let labels: Vec<BeliefLabel> = items.iter().map(|(_, l)| *l).collect();
    let (train_idx, test_idx) = stratified_split(&labels, train_fraction, seed);
    let class_set = |class: BeliefLabel| -> Vec<ParseString> {
        train_idx.iter().filter(|&&i| labels[i] == class).map(|&i| items[i].0.clone()).collect()
    };
    let train = [class_set(BeliefLabel::Yes), class_set(BeliefLabel::No)];
    for (set, class) in train.iter().zip([BeliefLabel::Yes, BeliefLabel::No]) {
        if set.is_empty() {
            return Err(ParseMedianError::ClassMissing(class));
        }
    }
    if test_idx.is_empty() {
        return Err(ParseMedianError::EmptyTestSet);
    }
    let test: Vec<&(ParseString, BeliefLabel)> = test_idx.iter().map(|&i| &items[i]).collect();
    let medians = MedianPair::from_sets(&train[0], &train[1], mode, exec)?;
    let predictions: Vec<Prediction> = exec.map(&test, |(p, label)| {
        let distance_yes = mode.distance(p.as_str(), medians.median_yes.as_str());
        let distance_no = mode.distance(p.as_str(), medians.median_no.as_str());
        Prediction {
            origin: p.origin.clone(),
            label: *label,
            predicted: if distance_yes < distance_no { BeliefLabel::Yes } else { BeliefLabel::No },
            distance_yes,
            distance_no,
        }
    });
    let correct = predictions.iter().filter(|p| p.label == p.predicted).count();
    Ok(StructureEval {
        accuracy: correct as f64 / predictions.len() as f64,
        n_train: train[0].len() + train[1].len(),
        n_test: predictions.len(),
        medians,
        predictions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parsemedian::levenshtein;
    use proptest::prelude::*;

    fn ps(s: &str) -> ParseString {
        ParseString { text: s.into(), origin: None }
    }

    #[test]
    fn median_examples() {
        assert_eq!(median_string(&["x"]).unwrap(), "x");
        assert_eq!(median_string(&["aab", "aba", "bba"]).unwrap(), "aba");
        assert_eq!(median_string(&["q", "q", "q"]).unwrap(), "q");
        assert_eq!(medoid_index(&["q", "q", "q"], DistanceMode::Char, Exec::Sequential).unwrap(), 0);
        assert_eq!(median_string::<&str>(&[]).unwrap_err(), ParseMedianError::EmptyInput);
    }

    #[test]
    fn classify_examples() {
        let m = MedianPair { median_yes: ps("ab"), median_no: ps("xyz") };
        assert_eq!(classify_by_median("abc", &m, DistanceMode::Char), BeliefLabel::Yes);
        assert_eq!(classify_by_median("ab", &m, DistanceMode::Char), BeliefLabel::Yes);
        let tie = MedianPair { median_yes: ps("ab"), median_no: ps("ba") };
        assert_eq!(classify_by_median("aa", &tie, DistanceMode::Char), BeliefLabel::No);
    }

    fn post(id: &str, text: &str) -> TweetRecord {
        TweetRecord {
            id: id.into(),
            author: "WHO".into(),
            text: text.into(),
            created_at: "2020-03-01T00:00:00Z".parse().unwrap(),
            in_reply_to: None,
            hashtags: vec![],
            votes: None,
            parse: None,
        }
    }

    fn replies(src: &TweetRecord, labels: &[BeliefLabel]) -> Vec<(LinkedPair, BeliefLabel)> {
        labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let mut r = post(&format!("{}-{i}", src.id), "reply");
                r.author = "someone".into();
                r.in_reply_to = Some(src.id.clone());
                (LinkedPair { source: src.clone(), response: r }, *l)
            })
            .collect()
    }

    #[test]
    fn majority_split() {
        use BeliefLabel::{No, Yes};
        let a = post("a", "COVID vaccines work");
        let b = post("b", "corona update");
        let c = post("c", "flu season");
        let mut l = replies(&a, &[Yes, Yes, No]);
        l.extend(replies(&b, &[Yes, No]));
        l.extend(replies(&c, &[Yes, Yes, Yes]));
        let split = split_by_majority_response(&l).unwrap();
        assert_eq!(split.yes.len(), 1);
        assert_eq!(split.yes[0].origin.as_deref(), Some("a"));
        assert_eq!(split.no.len(), 1);
        assert_eq!(split.no[0].origin.as_deref(), Some("b"));
    }

    #[test]
    fn supplied_parse_wins() {
        let mut t = post("a", "covid");
        t.parse = Some("(S (X y))".into());
        assert_eq!(parse_of(&t).unwrap().text, "(S (X y))");
        t.parse = Some("(S (X y)".into());
        assert!(parse_of(&t).is_err());
    }

    #[test]
    fn evaluation_errors() {
        let only_yes: Vec<_> = (0..5).map(|i| (ps(&format!("(S {i})")), BeliefLabel::Yes)).collect();
        assert_eq!(
            evaluate_structure_classifier(&only_yes, 0.7, 0, DistanceMode::Char, Exec::Sequential).unwrap_err(),
            ParseMedianError::ClassMissing(BeliefLabel::No)
        );
        let one_each = vec![(ps("(S a)"), BeliefLabel::Yes), (ps("(S b)"), BeliefLabel::No)];
        assert_eq!(
            evaluate_structure_classifier(&one_each, 0.7, 0, DistanceMode::Char, Exec::Sequential).unwrap_err(),
            ParseMedianError::EmptyTestSet
        );
        assert!(matches!(
            evaluate_structure_classifier(&one_each, 1.0, 0, DistanceMode::Char, Exec::Sequential),
            Err(ParseMedianError::InvalidSplit(_))
        ));
    }

    #[test]
    fn identical_strings_fall_to_no() {
        let mut items: Vec<_> = (0..30).map(|_| (ps("(S (NP (NN x)))"), BeliefLabel::Yes)).collect();
        items.extend((0..70).map(|_| (ps("(S (NP (NN x)))"), BeliefLabel::No)));
        let e = evaluate_structure_classifier(&items, 0.7, 4, DistanceMode::Char, Exec::Sequential).unwrap();
        let no_share = e.predictions.iter().filter(|p| p.label == BeliefLabel::No).count() as f64 / e.n_test as f64;
        assert_eq!(e.accuracy, no_share);
        assert_eq!((e.n_train, e.n_test), (70, 30));
    }

    #[test]
    fn perfect_when_test_equals_medians() {
        let mut items = vec![];
        for _ in 0..10 {
            items.push((ps("(S (NP (NN a)))"), BeliefLabel::Yes));
            items.push((ps("(S (VP (VB b)) (VP (VB c)))"), BeliefLabel::No));
        }
        let e = evaluate_structure_classifier(&items, 0.7, 1, DistanceMode::Char, Exec::Parallel).unwrap();
        assert_eq!(e.accuracy, 1.0);
    }

    /// Exhaustive argmin by direct pairwise sums.
    fn brute_median(set: &[String]) -> usize {
        let sums: Vec<usize> = set.iter().map(|a| set.iter().map(|b| levenshtein(a, b)).sum()).collect();
        let min = *sums.iter().min().unwrap();
        sums.iter().position(|&s| s == min).unwrap()
    }

    proptest! {
        #[test]
        fn medoid_attains_brute_force_minimum(set in prop::collection::vec("[abc]{0,8}", 1..=6)) {
            let got = medoid_index(&set, DistanceMode::Char, Exec::Sequential).unwrap();
            prop_assert_eq!(got, brute_median(&set));
        }

        #[test]
        fn swapping_medians_swaps_labels(p in "[ab()]{0,10}", y in "[ab()]{0,10}", n in "[ab()]{0,10}") {
            let m = MedianPair { median_yes: ps(&y), median_no: ps(&n) };
            let a = classify_by_median(&p, &m, DistanceMode::Char);
            let b = classify_by_median(&p, &m.swapped(), DistanceMode::Char);
            let (dy, dn) = (levenshtein(&p, &y), levenshtein(&p, &n));
            if dy == dn {
                prop_assert_eq!((a, b), (BeliefLabel::No, BeliefLabel::No));
            } else {
                prop_assert_ne!(a, b);
            }
        }
    }
}
