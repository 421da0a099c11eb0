//! Dijkstra over adjacency lists with a lexicographic tie-break on node sequences.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Single-source shortest paths. Among equal-length paths the lexicographically
/// smallest node sequence wins.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    source: usize,
    dist: Vec<f64>,
    pred: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl ShortestPaths {
    /// `passable(v)` gates relaxation out of `v`; the source is always expanded.
    pub fn compute(adj: &[Vec<(usize, f64)>], source: usize, passable: impl Fn(usize) -> bool) -> Self {
        let n = adj.len();
        let mut sp = Self {
            source,
            dist: vec![f64::INFINITY; n],
            pred: vec![NONE; n],
        };
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        sp.dist[source] = 0.0;
        heap.push(Entry(0.0, source));
        let mut relaxations = 0u64;
        while let Some(Entry(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u != source && !passable(u) {
                continue;
            }
            for &(v, w) in &adj[u] {
                relaxations += 1;
                if done[v] {
                    continue;
                }
                let nd = d + w;
                let better = nd < sp.dist[v]
                    || (nd == sp.dist[v] && sp.pred[v] != NONE && sp.lex_less_via(u, v));
                if better {
                    sp.dist[v] = nd;
                    sp.pred[v] = u;
                    heap.push(Entry(nd, v));
                }
            }
        }
        crate::work::add(relaxations);
        sp
    }

    /// Whether `path(u) + [v]` precedes the current `path(v)`.
    fn lex_less_via(&self, u: usize, v: usize) -> bool {
        let mut cand = self.path_to(u).unwrap_or_default();
        cand.push(v);
        let cur = self.path_to(v).unwrap_or_default();
        cand < cur
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn dist(&self, v: usize) -> f64 {
        self.dist[v]
    }

    pub fn reachable(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }

    /// Node sequence from the source to `v`, or `None` when unreachable.
    pub fn path_to(&self, v: usize) -> Option<Vec<usize>> {
        if !self.reachable(v) {
            return None;
        }
        let mut path = vec![v];
        let mut c = v;
        while c != self.source {
            c = self.pred[c];
            path.push(c);
        }
        path.reverse();
        Some(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b, w) in edges {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        adj
    }

    #[test]
    fn equal_length_paths_prefer_smaller_ids() {
        // Square 0-3-1 and 0-2-1 have equal length.
        let adj = undirected(4, &[(0, 3, 1.0), (3, 1, 1.0), (0, 2, 1.0), (2, 1, 1.0)]);
        let sp = ShortestPaths::compute(&adj, 0, |_| true);
        assert_eq!(sp.path_to(1), Some(vec![0, 2, 1]));
        assert_eq!(sp.dist(1), 2.0);
    }

    #[test]
    fn impassable_nodes_are_reached_but_not_crossed() {
        let adj = undirected(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let sp = ShortestPaths::compute(&adj, 0, |v| v != 1);
        assert!(sp.reachable(1));
        assert!(!sp.reachable(2));
    }
}
