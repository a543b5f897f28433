//! Fruchterman-Reingold layout in the unit square.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{HashtagGraph, Partition};
use crate::corpus::csv_field;
use crate::exec::Exec;

pub const DEFAULT_ITERATIONS: usize = 50;
const INITIAL_TEMPERATURE: f64 = 0.1;
const MIN_DISTANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutConfig {
    pub iterations: usize,
    pub seed: u64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig { iterations: DEFAULT_ITERATIONS, seed: 0 }
    }
}

/// Positions in `[0, 1]^2`, indexed like `graph.nodes()`.
///
/// Ideal distance `k = sqrt(1 / |V|)`; repulsion `k^2 / d` between every
/// pair, attraction `w d^2 / k` along edges. Displacement per step is capped
/// by a temperature that falls linearly from 0.1 to 0.
pub fn layout(graph: &HashtagGraph, cfg: &LayoutConfig, exec: Exec) -> Vec<(f64, f64)> {
    let n = graph.node_count();
    match n {
        0 => return Vec::new(),
        1 => return vec![(0.5, 0.5)],
        _ => {}
    }
    let k = (1.0 / n as f64).sqrt();
    let k2 = k * k;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pos: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let edges: Vec<(usize, usize, f64)> = graph.edges().map(|(u, v, w)| (u, v, w as f64)).collect();

    for step in 0..cfg.iterations {
        let t = INITIAL_TEMPERATURE * (1.0 - step as f64 / cfg.iterations as f64);
        let mut disp: Vec<(f64, f64)> = exec.map_range(n, |i| {
            let mut d = (0.0, 0.0);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (dx, dy, dist) = separation(&pos, i, j);
                let f = k2 / dist;
                d.0 += dx / dist * f;
                d.1 += dy / dist * f;
            }
            d
        });
        for &(u, v, w) in &edges {
            let (dx, dy, dist) = separation(&pos, u, v);
            let f = w * dist * dist / k;
            let (fx, fy) = (dx / dist * f, dy / dist * f);
            disp[u].0 -= fx;
            disp[u].1 -= fy;
            disp[v].0 += fx;
            disp[v].1 += fy;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = (d.0 * d.0 + d.1 * d.1).sqrt();
            if len > 0.0 && len.is_finite() {
                let s = len.min(t) / len;
                p.0 += d.0 * s;
                p.1 += d.1 * s;
            }
            p.0 = p.0.clamp(0.0, 1.0);
            p.1 = p.1.clamp(0.0, 1.0);
        }
    }
    pos
}

/// Vector from `j` to `i` and its length. Coincident nodes are pushed apart
/// along a fixed direction derived from their indices.
fn separation(pos: &[(f64, f64)], i: usize, j: usize) -> (f64, f64, f64) {
    let dx = pos[i].0 - pos[j].0;
    let dy = pos[i].1 - pos[j].1;
    let dist = (dx * dx + dy * dy).sqrt();
    if dist >= MIN_DISTANCE {
        return (dx, dy, dist);
    }
    let angle = (i.min(j) * 31 + i.max(j) * 17) as f64;
    let sign = if i < j { 1.0 } else { -1.0 };
    (sign * angle.cos() * MIN_DISTANCE, sign * angle.sin() * MIN_DISTANCE, MIN_DISTANCE)
}

/// CSV with header `node,x,y,community`.
pub fn layout_csv(graph: &HashtagGraph, positions: &[(f64, f64)], partition: &Partition) -> String {
    let mut out = String::from("node,x,y,community\n");
    for (i, name) in graph.nodes().iter().enumerate() {
        let (x, y) = positions[i];
        out.push_str(&format!("{},{x:.6},{y:.6},{}\n", csv_field(name), partition.assignment[i]));
    }
    out
}
