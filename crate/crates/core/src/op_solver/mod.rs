//! Budgeted orienteering on sparse graphs.
//!
//! A tour is a simple path from `start` to `end` (a closed walk when they coincide, in
//! which only the endpoint repeats) whose edge lengths sum to at most the budget. Each
//! visited node's reward is collected once, endpoints included.

mod brute;
mod generate;
mod heuristic;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use brute::{brute_force_op, BRUTE_FORCE_LIMIT};
pub use generate::random_geometric_instance;
pub use heuristic::solve_op;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpNode {
    pub id: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpInstance {
    pub start: usize,
    pub end: usize,
    /// Meters.
    pub budget: f64,
    pub nodes: Vec<OpNode>,
    pub edges: Vec<OpEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub nodes: Vec<usize>,
    pub total_length: f64,
    pub total_reward: f64,
}

impl OpInstance {
    pub fn from_toml(text: &str) -> Result<Self> {
        let inst: Self = toml::from_str(text).map_err(|e| Error::Parse {
            what: "orienteering instance".into(),
            message: e.to_string(),
        })?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("instance serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.compile().map(|_| ())
    }

    pub(crate) fn compile(&self) -> Result<Compiled> {
        let bad = |m: String| Err(Error::MalformedInstance(m));
        let mut ids: Vec<usize> = self.nodes.iter().map(|n| n.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return bad("duplicate node id".into());
        }
        // Dense indices follow ascending id, so index order is id order.
        let index: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let n = ids.len();
        let mut reward = vec![0.0; n];
        for node in &self.nodes {
            if !(node.reward >= 0.0) || !node.reward.is_finite() {
                return bad(format!("node {} has reward {}", node.id, node.reward));
            }
            reward[index[&node.id]] = node.reward;
        }
        let Some(&start) = index.get(&self.start) else {
            return bad(format!("start node {} missing", self.start));
        };
        let Some(&end) = index.get(&self.end) else {
            return bad(format!("end node {} missing", self.end));
        };
        if !(self.budget >= 0.0) {
            return bad(format!("budget {} is negative", self.budget));
        }
        let mut w = vec![f64::INFINITY; n * n];
        for e in &self.edges {
            let (Some(&a), Some(&b)) = (index.get(&e.a), index.get(&e.b)) else {
                return bad(format!("edge {}-{} references a missing node", e.a, e.b));
            };
            if a == b || !(e.length > 0.0) || !e.length.is_finite() {
                return bad(format!("edge {}-{} has length {}", e.a, e.b, e.length));
            }
            let l = w[a * n + b].min(e.length);
            w[a * n + b] = l;
            w[b * n + a] = l;
        }
        let mut adj = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                if w[a * n + b].is_finite() {
                    adj[a].push((b, w[a * n + b]));
                }
            }
        }
        Ok(Compiled { ids, reward, w, adj, start, end, budget: self.budget })
    }
}

/// Dense view of an instance.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub ids: Vec<usize>,
    pub reward: Vec<f64>,
    w: Vec<f64>,
    pub adj: Vec<Vec<(usize, f64)>>,
    pub start: usize,
    pub end: usize,
    pub budget: f64,
}

impl Compiled {
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn w(&self, a: usize, b: usize) -> f64 {
        self.w[a * self.n() + b]
    }

    pub fn closed(&self) -> bool {
        self.start == self.end
    }

    pub fn length(&self, seq: &[usize]) -> f64 {
        seq.windows(2).fold(0.0, |acc, p| acc + self.w(p[0], p[1]))
    }

    pub fn reward(&self, seq: &[usize]) -> f64 {
        let last = if seq.len() > 1 && seq[0] == seq[seq.len() - 1] { seq.len() - 1 } else { seq.len() };
        seq[..last].iter().fold(0.0, |acc, &v| acc + self.reward[v])
    }

    /// Endpoints pinned, consecutive nodes adjacent, no repeats except a closing endpoint.
    pub fn is_tour(&self, seq: &[usize]) -> bool {
        if seq.first() != Some(&self.start) || seq.last() != Some(&self.end) {
            return false;
        }
        if self.closed() && seq.len() == 2 {
            return false;
        }
        if !seq.windows(2).all(|p| self.w(p[0], p[1]).is_finite()) {
            return false;
        }
        let body = if self.closed() && seq.len() > 1 { &seq[..seq.len() - 1] } else { seq };
        let mut seen = vec![false; self.n()];
        body.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    pub fn to_tour(&self, seq: &[usize]) -> Tour {
        Tour {
            nodes: seq.iter().map(|&v| self.ids[v]).collect(),
            total_length: self.length(seq),
            total_reward: self.reward(seq),
        }
    }
}

impl Tour {
    /// Checks pinning, adjacency, simplicity, budget, and that stored totals match.
    pub fn verify(&self, inst: &OpInstance) -> Result<()> {
        let c = inst.compile()?;
        let index: HashMap<usize, usize> = c.ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let seq: Option<Vec<usize>> = self.nodes.iter().map(|id| index.get(id).copied()).collect();
        let bad = |m: &str| Err(Error::MalformedInstance(format!("tour rejected: {m}")));
        let Some(seq) = seq else {
            return bad("unknown node");
        };
        if !c.is_tour(&seq) {
            return bad("not a simple start-to-end path over instance edges");
        }
        let (len, rew) = (c.length(&seq), c.reward(&seq));
        if len > inst.budget {
            return bad("length exceeds budget");
        }
        if (len - self.total_length).abs() > 1e-9 * len.max(1.0)
            || (rew - self.total_reward).abs() > 1e-9 * rew.max(1.0)
        {
            return bad("stored totals differ from recomputation");
        }
        Ok(())
    }
}
