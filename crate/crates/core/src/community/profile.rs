use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{HashtagGraph, Partition};
use crate::corpus::{BeliefLabel, LinkedPair, TweetRecord};

pub const DEFAULT_TOP_HASHTAGS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommunityProfile {
    pub community: usize,
    pub members: usize,
    /// Most used hashtags by post count, ties broken lexicographically.
    pub top_hashtags: Vec<(String, usize)>,
    pub yes: usize,
    pub no: usize,
    /// Share of Yes among labelled replies, absent when there are none.
    pub percent_belief: Option<f64>,
}

/// `{handle: community}` for JSON export.
pub fn partition_map(graph: &HashtagGraph, partition: &Partition) -> BTreeMap<String, usize> {
    graph.nodes().iter().cloned().zip(partition.assignment.iter().copied()).collect()
}

/// One profile per community. Hashtag counts come from posts authored by
/// members; belief counts from labelled replies authored by members.
pub fn profile(
    graph: &HashtagGraph,
    partition: &Partition,
    records: &[TweetRecord],
    labeled: &[(LinkedPair, BeliefLabel)],
    top_k: usize,
) -> Vec<CommunityProfile> {
    let community_of: HashMap<&str, usize> = graph
        .nodes()
        .iter()
        .map(String::as_str)
        .zip(partition.assignment.iter().copied())
        .collect();
    let k = partition.community_count();
    let mut tags: Vec<BTreeMap<&str, usize>> = vec![BTreeMap::new(); k];
    for r in records {
        let Some(&c) = community_of.get(r.author.as_str()) else { continue };
        let mut seen: Vec<&str> = r.hashtags.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *tags[c].entry(t).or_default() += 1;
        }
    }
    let mut counts = vec![(0usize, 0usize); k];
    for (pair, label) in labeled {
        let Some(&c) = community_of.get(pair.response.author.as_str()) else { continue };
        match label {
            BeliefLabel::Yes => counts[c].0 += 1,
            BeliefLabel::No => counts[c].1 += 1,
        }
    }
    (0..k)
        .map(|c| {
            let mut top: Vec<(String, usize)> = tags[c].iter().map(|(t, n)| (t.to_string(), *n)).collect();
            top.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            top.truncate(top_k);
            let (yes, no) = counts[c];
            CommunityProfile {
                community: c,
                members: partition.members(c).count(),
                top_hashtags: top,
                yes,
                no,
                percent_belief: (yes + no > 0).then(|| 100.0 * yes as f64 / (yes + no) as f64),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::Level;

    fn post(id: &str, author: &str, tags: &[&str], reply_to: Option<&str>) -> TweetRecord {
        TweetRecord {
            id: id.into(),
            author: author.into(),
            text: String::new(),
            created_at: "2020-03-01T00:00:00Z".parse().unwrap(),
            in_reply_to: reply_to.map(String::from),
            hashtags: tags.iter().map(|t| t.to_string()).collect(),
            votes: None,
            parse: None,
        }
    }

    fn two_communities() -> (HashtagGraph, Partition) {
        let g = HashtagGraph::from_edges(&["a", "b", "c", "d"], &[(0, 1, 1), (2, 3, 1)]);
        let assignment = vec![0, 0, 1, 1];
        let p = Partition {
            assignment: assignment.clone(),
            modularity: 0.5,
            levels: vec![Level { assignment, modularity: 0.5 }],
        };
        (g, p)
    }

    fn labeled(src: &TweetRecord, author: &str, yes: usize, no: usize) -> Vec<(LinkedPair, BeliefLabel)> {
        let mut out = Vec::new();
        for i in 0..yes + no {
            let response = post(&format!("{author}-{i}"), author, &[], Some(&src.id));
            let label = if i < yes { BeliefLabel::Yes } else { BeliefLabel::No };
            out.push((LinkedPair { source: src.clone(), response }, label));
        }
        out
    }

    #[test]
    fn percentages() {
        let (g, p) = two_communities();
        let src = post("s", "WHO", &[], None);
        let mut l = labeled(&src, "a", 17, 3);
        l.extend(labeled(&src, "c", 0, 9));
        let prof = profile(&g, &p, &[], &l, DEFAULT_TOP_HASHTAGS);
        assert_eq!(prof[0].percent_belief, Some(85.0));
        assert_eq!(prof[1].percent_belief, Some(0.0));
        let prof = profile(&g, &p, &[], &[], DEFAULT_TOP_HASHTAGS);
        assert_eq!(prof[0].percent_belief, None);
    }

    #[test]
    fn hashtags_sorted_by_count_then_name() {
        let (g, p) = two_communities();
        let recs = [
            post("1", "a", &["zeta", "alpha"], None),
            post("2", "b", &["zeta", "beta"], None),
            post("3", "a", &["beta", "beta"], None),
            post("4", "c", &["other"], None),
        ];
        let prof = profile(&g, &p, &recs, &[], 2);
        assert_eq!(prof[0].top_hashtags, [("beta".to_string(), 2), ("zeta".to_string(), 2)]);
        assert_eq!(prof[0].members, 2);
        assert_eq!(prof[1].top_hashtags, [("other".to_string(), 1)]);
        assert_eq!(partition_map(&g, &p)["d"], 1);
    }
}
