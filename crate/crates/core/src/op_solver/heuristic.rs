//! Greedy ratio insertion followed by 2-opt and removal-reinsertion local search.

use rand::Rng;

use super::{Compiled, OpInstance, Tour};
use crate::error::{Error, Result};
use crate::graph::ShortestPaths;

const IMPROVE_EPS: f64 = 1e-9;

/// Extra constructions, each forcing one of the highest-reward nodes into the seed path
/// before the greedy pass. Ratio insertion alone spends slack on cheap low-reward nodes
/// and can wall off a distant high-reward one.
const FORCED_STARTS: usize = 4;

/// Heuristic orienteering tour. The RNG only breaks exact ties between insertions.
pub fn solve_op<R: Rng + ?Sized>(inst: &OpInstance, rng: &mut R) -> Result<Tour> {
    let c = inst.compile()?;
    let sp = ShortestPaths::compute(&c.adj, c.start, |_| true);
    if sp.dist(c.end) > c.budget {
        return Err(Error::Infeasible { shortest: sp.dist(c.end), budget: c.budget });
    }
    let seed = sp.path_to(c.end).expect("end reachable");
    let mut best = improve(&c, seed.clone(), rng);
    let on_seed = membership(&c, &seed);
    let mut ranked: Vec<usize> = (0..c.n()).filter(|&v| !on_seed[v] && c.reward[v] > 0.0).collect();
    ranked.sort_by(|&a, &b| c.reward[b].total_cmp(&c.reward[a]).then(a.cmp(&b)));
    for &v in ranked.iter().take(FORCED_STARTS) {
        let Some(forced) = insertion(&c, &seed, Some(v), rng) else { continue };
        let cand = improve(&c, forced, rng);
        if improves(&c, &cand, &best) {
            best = cand;
        }
    }
    debug_assert!(c.is_tour(&best) && c.length(&best) <= c.budget);
    Ok(c.to_tour(&best))
}

/// Greedy fill, then 2-opt and removal-reinsertion capped at `10 |V|` moves.
fn improve<R: Rng + ?Sized>(c: &Compiled, mut seq: Vec<usize>, rng: &mut R) -> Vec<usize> {
    insert_greedy(c, &mut seq, rng);
    for _ in 0..10 * c.n() {
        match two_opt(c, &seq).or_else(|| remove_reinsert(c, &seq, rng)) {
            Some(s) => seq = s,
            None => break,
        }
    }
    seq
}

fn improves(c: &Compiled, new: &[usize], old: &[usize]) -> bool {
    let (rn, ro) = (c.reward(new), c.reward(old));
    rn > ro + IMPROVE_EPS || (rn >= ro - IMPROVE_EPS && c.length(new) < c.length(old) - IMPROVE_EPS)
}

fn membership(c: &Compiled, seq: &[usize]) -> Vec<bool> {
    let mut m = vec![false; c.n()];
    for &v in seq {
        m[v] = true;
    }
    m
}

/// Anchor pairs `(position, a, b, direct length)`. A lone closed-tour node pairs with itself.
fn anchor_pairs(c: &Compiled, seq: &[usize]) -> Vec<(usize, usize, usize, f64)> {
    if seq.len() == 1 {
        return vec![(0, seq[0], seq[0], 0.0)];
    }
    (0..seq.len() - 1).map(|p| (p, seq[p], seq[p + 1], c.w(seq[p], seq[p + 1]))).collect()
}

struct Insertion {
    pos: usize,
    segment: Vec<usize>,
    detour: f64,
    gain: f64,
}

/// Best insertion by new reward per meter of detour, restricted to target `only` when set.
/// Sub-paths avoid tour nodes and each other; on overlap the second leg is re-planned
/// around the first.
fn insertion<R: Rng + ?Sized>(c: &Compiled, seq: &[usize], only: Option<usize>, rng: &mut R) -> Option<Vec<usize>> {
    let in_tour = membership(c, seq);
    let length = c.length(seq);
    let slack = c.budget - length;
    let mut trees: Vec<Option<ShortestPaths>> = vec![None; c.n()];
    for &a in seq {
        if trees[a].is_none() {
            trees[a] = Some(ShortestPaths::compute(&c.adj, a, |v| !in_tour[v]));
        }
    }
    let mut best: Vec<Insertion> = Vec::new();
    let mut best_ratio = f64::NEG_INFINITY;
    for (pos, a, b, base) in anchor_pairs(c, seq) {
        let (ta, tb) = (trees[a].as_ref().unwrap(), trees[b].as_ref().unwrap());
        for v in 0..c.n() {
            if in_tour[v] || c.reward[v] <= 0.0 || only.is_some_and(|o| o != v) {
                continue;
            }
            let lb = ta.dist(v) + tb.dist(v) - base;
            if !(lb <= slack) {
                continue;
            }
            let leg1 = ta.path_to(v).unwrap();
            let mut leg2 = tb.path_to(v).unwrap();
            leg2.reverse();
            let mut used = vec![false; c.n()];
            for &x in &leg1[1..] {
                used[x] = true;
            }
            let (leg2, d2) = if leg2[1..leg2.len() - 1].iter().any(|&x| used[x]) {
                let alt = ShortestPaths::compute(&c.adj, v, |x| x == v || (!in_tour[x] && !used[x]));
                match alt.path_to(b) {
                    Some(p) if p[1..p.len() - 1].iter().all(|&x| !used[x] && !in_tour[x]) => (p, alt.dist(b)),
                    _ => continue,
                }
            } else {
                (leg2, tb.dist(v))
            };
            let detour = ta.dist(v) + d2 - base;
            if detour > slack {
                continue;
            }
            let mut segment = leg1[1..].to_vec();
            segment.extend_from_slice(&leg2[1..leg2.len() - 1]);
            let gain: f64 = segment.iter().map(|&x| c.reward[x]).sum();
            let ratio = gain / detour.max(1e-9);
            if ratio > best_ratio {
                best_ratio = ratio;
                best.clear();
            }
            if ratio == best_ratio {
                best.push(Insertion { pos, segment, detour, gain });
            }
        }
    }
    if best.is_empty() {
        return None;
    }
    let pick = if best.len() > 1 { rng.gen_range(0..best.len()) } else { 0 };
    let ins = &best[pick];
    debug_assert!(ins.gain > 0.0 && ins.detour <= slack);
    let mut out = seq[..=ins.pos].to_vec();
    out.extend_from_slice(&ins.segment);
    if seq.len() == 1 {
        out.push(seq[0]);
    } else {
        out.extend_from_slice(&seq[ins.pos + 1..]);
    }
    // Guard against floating drift in the detour arithmetic.
    (c.is_tour(&out) && c.length(&out) <= c.budget).then_some(out)
}

fn insert_greedy<R: Rng + ?Sized>(c: &Compiled, seq: &mut Vec<usize>, rng: &mut R) {
    while let Some(s) = insertion(c, seq, None, rng) {
        *seq = s;
    }
}

/// First improving segment reversal whose reconnecting edges exist.
fn two_opt(c: &Compiled, seq: &[usize]) -> Option<Vec<usize>> {
    let l = seq.len();
    for i in 1..l.saturating_sub(1) {
        for j in i + 1..l - 1 {
            let (p, a, b, q) = (seq[i - 1], seq[i], seq[j], seq[j + 1]);
            let delta = c.w(p, b) + c.w(a, q) - c.w(p, a) - c.w(b, q);
            if delta < -IMPROVE_EPS {
                let mut out = seq.to_vec();
                out[i..=j].reverse();
                return Some(out);
            }
        }
    }
    None
}

/// Drops one interior node, reconnects its neighbours around the remaining tour, and
/// refills by greedy insertion; returns the first strictly better result.
fn remove_reinsert<R: Rng + ?Sized>(c: &Compiled, seq: &[usize], rng: &mut R) -> Option<Vec<usize>> {
    for p in 1..seq.len().saturating_sub(1) {
        let (a, x, b) = (seq[p - 1], seq[p], seq[p + 1]);
        let mut cand: Vec<usize> = if a == b {
            // Closing out-and-back: [.., a, x, a] collapses to [.., a].
            let mut v = seq[..p].to_vec();
            v.extend_from_slice(&seq[p + 2..]);
            v
        } else {
            let mut blocked = membership(c, seq);
            blocked[a] = false;
            let sp = ShortestPaths::compute(&c.adj, a, |v| v == a || (!blocked[v] && v != x));
            let Some(bridge) = sp.path_to(b) else { continue };
            if bridge[1..bridge.len() - 1].iter().any(|&v| v == x || blocked[v]) {
                continue;
            }
            let mut v = seq[..p - 1].to_vec();
            v.extend_from_slice(&bridge);
            v.extend_from_slice(&seq[p + 2..]);
            v
        };
        if !c.is_tour(&cand) || c.length(&cand) > c.budget {
            continue;
        }
        insert_greedy(c, &mut cand, rng);
        if improves(c, &cand, seq) {
            return Some(cand);
        }
    }
    None
}
