use serde::{Deserialize, Serialize};

use crate::exec::Exec;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Unit-cost edits over characters.
    #[default]
    Char,
    /// Unit-cost edits over brackets and atoms.
    Token,
}

impl DistanceMode {
    pub fn distance(self, a: &str, b: &str) -> usize {
        match self {
            DistanceMode::Char => levenshtein(a, b),
            DistanceMode::Token => token_levenshtein(a, b),
        }
    }
}

/// Unit-cost insert/delete/substitute distance between two sequences.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Character-level Levenshtein distance.
pub fn levenshtein(a: &str, b: &str) -> usize {
    if a.is_ascii() && b.is_ascii() {
        return edit_distance(a.as_bytes(), b.as_bytes());
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    edit_distance(&a, &b)
}

/// Brackets and whitespace-separated atoms of a parse string.
pub fn tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(st) = start.take() {
                out.push(&s[st..i]);
            }
            if !c.is_whitespace() {
                out.push(&s[i..i + 1]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

/// Levenshtein distance over [`tokens`].
pub fn token_levenshtein(a: &str, b: &str) -> usize {
    edit_distance(&tokens(a), &tokens(b))
}

/// Symmetric pairwise distance matrix. Rows are computed under `exec`.
pub fn distance_matrix<S: AsRef<str> + Sync>(strings: &[S], mode: DistanceMode, exec: Exec) -> Vec<Vec<usize>> {
    let n = strings.len();
    let upper: Vec<Vec<usize>> = exec.map_range(n, |i| {
        ((i + 1)..n).map(|j| mode.distance(strings[i].as_ref(), strings[j].as_ref())).collect()
    });
    let mut m = vec![vec![0; n]; n];
    for (i, row) in upper.iter().enumerate() {
        for (off, &d) in row.iter().enumerate() {
            let j = i + 1 + off;
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Full-matrix Wagner-Fischer reference.
    fn oracle(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in d.iter_mut().enumerate() {
            row[0] = i;
        }
        for j in 0..=b.len() {
            d[0][j] = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
                d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
            }
        }
        d[a.len()][b.len()]
    }

    #[test]
    fn examples() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("aab", "bba"), 3);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("héllo", "hello"), 1);
    }

    #[test]
    fn token_mode() {
        assert_eq!(tokens("(S (NP (NN cat)))"), ["(", "S", "(", "NP", "(", "NN", "cat", ")", ")", ")"]);
        assert_eq!(token_levenshtein("(S (NP (NN cat)))", "(S (NP (NN dog)))"), 1);
        assert_eq!(levenshtein("(S (NP (NN cat)))", "(S (NP (NN dog)))"), 3);
    }

    #[test]
    fn matrix_is_symmetric_and_exec_independent() {
        let s = ["abc", "abd", "xyz", "", "aabbcc"];
        let a = distance_matrix(&s, DistanceMode::Char, Exec::Sequential);
        let b = distance_matrix(&s, DistanceMode::Char, Exec::Parallel);
        assert_eq!(a, b);
        for i in 0..s.len() {
            for j in 0..s.len() {
                assert_eq!(a[i][j], oracle(s[i], s[j]));
            }
        }
    }

    proptest! {
        #[test]
        fn agrees_with_oracle(a in "[abcd]{0,64}", b in "[abcd]{0,64}") {
            prop_assert_eq!(levenshtein(&a, &b), oracle(&a, &b));
        }

        #[test]
        fn metric_axioms(a in "[abcd]{0,16}", b in "[abcd]{0,16}", c in "[abcd]{0,16}") {
            let ab = levenshtein(&a, &b);
            prop_assert_eq!(ab == 0, a == b);
            prop_assert_eq!(ab, levenshtein(&b, &a));
            prop_assert!(ab <= levenshtein(&a, &c) + levenshtein(&c, &b));
        }
    }
}
