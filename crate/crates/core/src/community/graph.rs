use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::TweetRecord;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeWeighting {
    /// `w(u, v) = sum over hashtags h of n_u(h) * n_v(h)`.
    #[default]
    Multiplicity,
    /// `w(u, v) = 1` whenever the users share any hashtag.
    Binary,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphOptions {
    pub weighting: EdgeWeighting,
    /// Keep authors who never used a hashtag as isolated nodes.
    pub keep_isolated: bool,
}

/// Undirected user graph weighted by shared hashtag usage. Nodes are sorted
/// handles; each edge is stored once as `(u, v)` with `u < v`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HashtagGraph {
    nodes: Vec<String>,
    edges: BTreeMap<(usize, usize), u64>,
}

impl HashtagGraph {
    /// Builds a graph from explicit weighted edges. Self-loops and zero
    /// weights are dropped; repeated edges accumulate.
    pub fn from_edges<S: AsRef<str>>(nodes: &[S], edges: &[(usize, usize, u64)]) -> Self {
        let mut g = HashtagGraph {
            nodes: nodes.iter().map(|n| n.as_ref().to_string()).collect(),
            edges: BTreeMap::new(),
        };
        for &(u, v, w) in edges {
            assert!(u < g.nodes.len() && v < g.nodes.len(), "edge ({u}, {v}) out of range");
            if u != v && w > 0 {
                *g.edges.entry((u.min(v), u.max(v))).or_default() += w;
            }
        }
        g
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_index(&self, handle: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(handle)).ok()
    }

    pub fn weight(&self, u: usize, v: usize) -> u64 {
        self.edges.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// `(u, v, w)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (u, v, w) in self.edges() {
            adj[u].push((v, w as f64));
            adj[v].push((u, w as f64));
        }
        adj
    }

    /// Graphviz export with `weight` attributes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph hashtags {\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  \"{}\";", dot_escape(n));
        }
        for (u, v, w) in self.edges() {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\" [weight={w}];",
                dot_escape(&self.nodes[u]),
                dot_escape(&self.nodes[v])
            );
        }
        out.push_str("}\n");
        out
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Per-user count of posts carrying each hashtag. A tag repeated inside one
/// post counts once.
pub fn hashtag_usage(records: &[TweetRecord]) -> BTreeMap<&str, BTreeMap<&str, u64>> {
    let mut usage: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    for r in records {
        let tags: BTreeSet<&str> = r.hashtags.iter().map(String::as_str).collect();
        for tag in tags {
            *usage.entry(r.author.as_str()).or_default().entry(tag).or_default() += 1;
        }
    }
    usage
}

pub fn build_graph(records: &[TweetRecord], opts: GraphOptions) -> HashtagGraph {
    let usage = hashtag_usage(records);
    let mut nodes: BTreeSet<&str> = usage.keys().copied().collect();
    if opts.keep_isolated {
        nodes.extend(records.iter().map(|r| r.author.as_str()));
    }
    let nodes: Vec<String> = nodes.into_iter().map(String::from).collect();
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();

    let mut by_tag: BTreeMap<&str, Vec<(usize, u64)>> = BTreeMap::new();
    for (user, tags) in &usage {
        for (tag, n) in tags {
            by_tag.entry(tag).or_default().push((index[user], *n));
        }
    }
    let mut edges: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for users in by_tag.values() {
        for (a, &(u, nu)) in users.iter().enumerate() {
            for &(v, nv) in &users[a + 1..] {
                let key = (u.min(v), u.max(v));
                match opts.weighting {
                    EdgeWeighting::Multiplicity => *edges.entry(key).or_default() += nu * nv,
                    EdgeWeighting::Binary => {
                        edges.insert(key, 1);
                    }
                }
            }
        }
    }
    HashtagGraph { nodes, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn post(id: usize, author: &str, tags: &[&str]) -> TweetRecord {
        TweetRecord {
            id: id.to_string(),
            author: author.into(),
            text: String::new(),
            created_at: "2020-03-01T00:00:00Z".parse().unwrap(),
            in_reply_to: None,
            hashtags: tags.iter().map(|t| t.to_string()).collect(),
            votes: None,
            parse: None,
        }
    }

    #[test]
    fn no_shared_tags_no_edges() {
        let g = build_graph(&[post(1, "u", &["x"]), post(2, "v", &["y"])], GraphOptions::default());
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn single_shared_tag() {
        let g = build_graph(&[post(1, "u", &["x"]), post(2, "v", &["x"])], GraphOptions::default());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 1)]);
    }

    #[test]
    fn multiplicity_formula() {
        let recs = [
            post(1, "u", &["x"]),
            post(2, "u", &["x", "y"]),
            post(3, "v", &["x"]),
            post(4, "v", &["x"]),
            post(5, "v", &["x", "y"]),
        ];
        // u: x twice, y once. v: x three times, y once. 2*3 + 1*1.
        let g = build_graph(&recs, GraphOptions::default());
        assert_eq!(g.weight(0, 1), 7);
        let g = build_graph(&recs, GraphOptions { weighting: EdgeWeighting::Binary, ..Default::default() });
        assert_eq!(g.weight(0, 1), 1);
    }

    #[test]
    fn hashtagless_users_dropped_by_default() {
        let recs = [post(1, "u", &["x"]), post(2, "v", &["x"]), post(3, "quiet", &[])];
        assert_eq!(build_graph(&recs, GraphOptions::default()).node_count(), 2);
        let g = build_graph(&recs, GraphOptions { keep_isolated: true, ..Default::default() });
        assert_eq!(g.nodes(), ["quiet", "u", "v"]);
    }

    #[test]
    fn dot_export() {
        let g = HashtagGraph::from_edges(&["a", "b\"q"], &[(1, 0, 3)]);
        let dot = g.to_dot();
        assert!(dot.contains("\"a\" -- \"b\\\"q\" [weight=3];"));
    }

    proptest! {
        #[test]
        fn weights_match_tweet_pair_double_loop(
            posts in prop::collection::vec((0usize..6, prop::collection::vec(0usize..5, 0..4)), 0..200),
        ) {
            let tags = ["a", "b", "c", "d", "e"];
            let recs: Vec<_> = posts
                .iter()
                .enumerate()
                .map(|(i, (u, ts))| {
                    let ts: Vec<&str> = ts.iter().map(|t| tags[*t]).collect();
                    post(i, &format!("user{u}"), &ts)
                })
                .collect();
            let g = build_graph(&recs, GraphOptions::default());
            // Brute force: every pair of posts by different users adds the
            // size of their hashtag intersection.
            let mut expected: BTreeMap<(String, String), u64> = BTreeMap::new();
            for (i, a) in recs.iter().enumerate() {
                for b in &recs[i + 1..] {
                    if a.author == b.author {
                        continue;
                    }
                    let sa: BTreeSet<_> = a.hashtags.iter().collect();
                    let sb: BTreeSet<_> = b.hashtags.iter().collect();
                    let shared = sa.intersection(&sb).count() as u64;
                    if shared > 0 {
                        let key = if a.author < b.author {
                            (a.author.clone(), b.author.clone())
                        } else {
                            (b.author.clone(), a.author.clone())
                        };
                        *expected.entry(key).or_default() += shared;
                    }
                }
            }
            let got: BTreeMap<(String, String), u64> = g
                .edges()
                .map(|(u, v, w)| ((g.nodes()[u].clone(), g.nodes()[v].clone()), w))
                .collect();
            prop_assert_eq!(got, expected);
            for (u, v, w) in g.edges() {
                prop_assert!(u < v && w >= 1);
            }
        }
    }
}
