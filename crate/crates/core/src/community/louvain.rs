//! Two-phase Louvain modularity optimisation.
//!
//! Phase one moves single nodes to the neighbouring community with the
//! largest modularity gain until a full pass changes nothing. Phase two
//! collapses communities into super-nodes. The two alternate until phase one
//! makes no merge. Equal gains resolve to the lowest community id and a node
//! only leaves its community for a strictly better one.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CommunityError, HashtagGraph};
use crate::exec::Exec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LouvainConfig {
    pub seed: u64,
    pub resolution: f64,
    /// Safety cap on local-move passes per level.
    pub max_passes: usize,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig { seed: 0, resolution: 1.0, max_passes: 1000 }
    }
}

/// Assignment of every original node after one aggregation level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub assignment: Vec<usize>,
    pub modularity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    /// Community of each node, in graph node order. Ids are dense from 0 and
    /// numbered by first appearance.
    pub assignment: Vec<usize>,
    pub modularity: f64,
    /// Intermediate levels, the last of which equals `assignment`.
    pub levels: Vec<Level>,
}

impl Partition {
    pub fn community_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    pub fn members(&self, community: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment.iter().enumerate().filter(move |(_, c)| **c == community).map(|(i, _)| i)
    }
}

/// Newman modularity of `assignment` on `graph`:
/// `sum_c [ in_c / 2m - resolution * (tot_c / 2m)^2 ]`.
pub fn modularity(graph: &HashtagGraph, assignment: &[usize], resolution: f64) -> f64 {
    let m2 = 2.0 * graph.total_weight() as f64;
    if m2 == 0.0 {
        return 0.0;
    }
    let k = assignment.iter().max().map_or(0, |m| m + 1);
    let mut internal = vec![0.0; k];
    let mut total = vec![0.0; k];
    for (u, v, w) in graph.edges() {
        let w = w as f64;
        total[assignment[u]] += w;
        total[assignment[v]] += w;
        if assignment[u] == assignment[v] {
            internal[assignment[u]] += 2.0 * w;
        }
    }
    internal
        .iter()
        .zip(&total)
        .map(|(i, t)| i / m2 - resolution * (t / m2) * (t / m2))
        .sum()
}

/// Working graph of one level; self-loops hold the doubled internal weight of
/// the communities a super-node stands for.
struct Level0 {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
    m2: f64,
}

impl Level0 {
    fn from_graph(g: &HashtagGraph) -> Self {
        let adj = g.adjacency();
        let degree = adj.iter().map(|n| n.iter().map(|(_, w)| w).sum()).collect();
        Level0 { self_loop: vec![0.0; adj.len()], adj, degree, m2: 2.0 * g.total_weight() as f64 }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn aggregate(&self, comm: &[usize], k: usize) -> Self {
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        let mut self_loop = vec![0.0; k];
        for (i, nbrs) in self.adj.iter().enumerate() {
            let ci = comm[i];
            self_loop[ci] += self.self_loop[i];
            for &(j, w) in nbrs {
                let cj = comm[j];
                if ci == cj {
                    self_loop[ci] += w;
                } else {
                    *weights[ci].entry(cj).or_default() += w;
                }
            }
        }
        let adj: Vec<Vec<(usize, f64)>> = weights.into_iter().map(|m| m.into_iter().collect()).collect();
        let degree = adj
            .iter()
            .zip(&self_loop)
            .map(|(n, s)| n.iter().map(|(_, w)| w).sum::<f64>() + s)
            .collect();
        Level0 { adj, self_loop, degree, m2: self.m2 }
    }

    /// Local moving phase. Returns the final community of each node and
    /// whether any node moved.
    fn local_moves(&self, rng: &mut ChaCha8Rng, cfg: &LouvainConfig) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let eps = 1e-12 * self.m2.max(1.0);
        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;
        for _ in 0..cfg.max_passes {
            let mut moved = false;
            for &i in &order {
                let ci = comm[i];
                let ki = self.degree[i];
                for &(j, w) in &self.adj[i] {
                    let cj = comm[j];
                    if link[cj] == 0.0 {
                        touched.push(cj);
                    }
                    link[cj] += w;
                }
                tot[ci] -= ki;
                let gain = |c: usize, link: &[f64]| link[c] - cfg.resolution * tot[c] * ki / self.m2;
                let mut best = ci;
                let mut best_gain = gain(ci, &link);
                touched.sort_unstable();
                for &c in &touched {
                    if c == ci {
                        continue;
                    }
                    let g = gain(c, &link);
                    if g > best_gain + eps {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += ki;
                comm[i] = best;
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
                if best != ci {
                    moved = true;
                    any_move = true;
                }
            }
            if !moved {
                break;
            }
        }
        (comm, any_move)
    }
}

/// Renumbers ids densely by first appearance.
fn relabel(comm: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; comm.len().max(comm.iter().max().map_or(0, |m| m + 1))];
    let mut next = 0;
    let out = comm
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect();
    (out, next)
}

pub fn louvain(graph: &HashtagGraph, seed: u64) -> Result<Partition, CommunityError> {
    louvain_with(graph, &LouvainConfig { seed, ..Default::default() })
}

pub fn louvain_with(graph: &HashtagGraph, cfg: &LouvainConfig) -> Result<Partition, CommunityError> {
    if graph.edge_count() == 0 {
        return Err(CommunityError::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut level = Level0::from_graph(graph);
    let mut node_comm: Vec<usize> = (0..graph.node_count()).collect();
    let mut levels: Vec<Level> = Vec::new();
    loop {
        let (comm, moved) = level.local_moves(&mut rng, cfg);
        let (comm, k) = relabel(&comm);
        if !moved || k == level.len() {
            break;
        }
        for c in node_comm.iter_mut() {
            *c = comm[*c];
        }
        levels.push(Level {
            assignment: node_comm.clone(),
            modularity: modularity(graph, &node_comm, cfg.resolution),
        });
        level = level.aggregate(&comm, k);
    }
    let (assignment, _) = relabel(&node_comm);
    if levels.is_empty() {
        levels.push(Level { assignment: assignment.clone(), modularity: modularity(graph, &assignment, cfg.resolution) });
    }
    let modularity = modularity(graph, &assignment, cfg.resolution);
    Ok(Partition { assignment, modularity, levels })
}

/// Runs one Louvain per seed under `exec` and keeps the highest modularity,
/// preferring the earlier seed on ties.
pub fn louvain_best_of(
    graph: &HashtagGraph,
    seeds: &[u64],
    base: &LouvainConfig,
    exec: Exec,
) -> Result<(u64, Partition), CommunityError> {
    let runs = exec.map(seeds, |&seed| louvain_with(graph, &LouvainConfig { seed, ..*base }));
    let mut best: Option<(u64, Partition)> = None;
    for (seed, run) in seeds.iter().zip(runs) {
        let p = run?;
        if best.as_ref().is_none_or(|(_, b)| p.modularity > b.modularity) {
            best = Some((*seed, p));
        }
    }
    best.ok_or(CommunityError::EmptyGraph)
}
