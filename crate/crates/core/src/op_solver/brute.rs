use super::{Compiled, OpInstance, Tour};
use crate::error::{Error, Result};

pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Exact optimum by enumerating every budget-feasible tour. Ties prefer the shorter
/// tour, then the lexicographically smaller id sequence.
pub fn brute_force_op(inst: &OpInstance) -> Result<Tour> {
    let c = inst.compile()?;
    if c.n() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { nodes: c.n(), limit: BRUTE_FORCE_LIMIT });
    }
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let mut path = vec![c.start];
    let mut on = vec![false; c.n()];
    on[c.start] = true;
    dfs(&c, &mut path, &mut on, 0.0, &mut best);
    match best {
        Some((_, _, seq)) => Ok(c.to_tour(&seq)),
        None => {
            let sp = crate::graph::ShortestPaths::compute(&c.adj, c.start, |_| true);
            Err(Error::Infeasible { shortest: sp.dist(c.end), budget: c.budget })
        }
    }
}

fn offer(c: &Compiled, seq: &[usize], len: f64, best: &mut Option<(f64, f64, Vec<usize>)>) {
    let rew = c.reward(seq);
    let better = match best {
        None => true,
        Some((br, bl, bs)) => {
            rew > *br || (rew == *br && (len < *bl || (len == *bl && seq < bs.as_slice())))
        }
    };
    if better {
        *best = Some((rew, len, seq.to_vec()));
    }
}

fn dfs(c: &Compiled, path: &mut Vec<usize>, on: &mut [bool], len: f64, best: &mut Option<(f64, f64, Vec<usize>)>) {
    let u = *path.last().unwrap();
    if u == c.end && (path.len() > 1 || c.closed()) {
        offer(c, path, len, best);
        if path.len() > 1 {
            return;
        }
    }
    for &(v, w) in &c.adj[u] {
        let nl = len + w;
        if nl > c.budget {
            continue;
        }
        let closing = c.closed() && v == c.start && path.len() >= 2;
        if on[v] && !closing {
            continue;
        }
        path.push(v);
        if closing {
            offer(c, path, nl, best);
        } else {
            on[v] = true;
            dfs(c, path, on, nl, best);
            on[v] = false;
        }
        path.pop();
    }
}
