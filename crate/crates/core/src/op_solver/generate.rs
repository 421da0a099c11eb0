use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{OpEdge, OpInstance, OpNode};
use crate::graph::ShortestPaths;

/// Seeded random geometric instance: `n` points in a 10 m square joined when within 5 m,
/// integer rewards in `0..=20`, start 0 and end `n - 1` (or a closed tour for every fifth seed).
pub fn random_geometric_instance(n: usize, seed: u64) -> OpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
    let nodes = (0..n).map(|id| OpNode { id, reward: rng.gen_range(0..=20) as f64 }).collect();
    let mut edges = Vec::new();
    let mut adj = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            let length = (pts[a].0 - pts[b].0).hypot(pts[a].1 - pts[b].1);
            if length <= 5.0 {
                edges.push(OpEdge { a, b, length });
                adj[a].push((b, length));
                adj[b].push((a, length));
            }
        }
    }
    let end = if seed.is_multiple_of(5) { 0 } else { n - 1 };
    let shortest = ShortestPaths::compute(&adj, 0, |_| true).dist(end);
    let slack = rng.gen_range(0.0..12.0);
    let budget = if shortest.is_finite() { shortest + slack } else { slack };
    OpInstance { start: 0, end, budget, nodes, edges }
}
