//! Incremental dual-layer roadmap.
//!
//! Aerial and ground nodes live in one graph. Intra-layer edges join nodes of the same
//! layer; rendezvous edges join an aerial node with the ground node straight beneath it.

mod collision;
mod expand;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ShortestPaths;
use crate::grid_map::{Config, Layer, VoxelMap};
use crate::Vec3;

pub use collision::{
    is_config_free, project_config, segment_free, validate_rendezvous_edge, BodyModel,
};
pub use expand::{expand_layers, expand_roadmap, ExpandStats};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Uav,
    Ugv,
    Rendezvous,
}

impl From<Layer> for EdgeKind {
    fn from(l: Layer) -> Self {
        match l {
            Layer::Uav => EdgeKind::Uav,
            Layer::Ugv => EdgeKind::Ugv,
        }
    }
}

/// How a node entered the roadmap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeOrigin {
    /// Inserted directly (robot poses); no spacing rule applied.
    Anchor,
    Frontier,
    Local,
    Global,
    Projection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadmapNode {
    pub id: NodeId,
    pub config: Config,
    pub reward: u64,
    pub best_yaw: Option<f64>,
    pub origin: NodeOrigin,
    /// Distance to the nearest same-layer node when inserted; `None` for the first node.
    pub nn_distance: Option<f64>,
    pub rendezvous: Option<NodeId>,
    /// Bit `k` set: a scan was taken here at heading `k` of the layer's sensor (bit 0 for
    /// omnidirectional sensors). Rescanning an identical pose maps nothing.
    pub scanned: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadmapEdge {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: EdgeKind,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingParams {
    pub d_min: f64,
    pub d_max: f64,
    pub n_max_uav: usize,
    pub n_max_ugv: usize,
    pub k_neighbors: usize,
    pub local_radius: f64,
    pub local_attempts: usize,
    pub global_attempts: usize,
    /// Heights (meters) of the frontier slices.
    pub slice_heights: Vec<f64>,
    pub min_blob_cells: usize,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            d_min: 1.2,
            d_max: 3.0,
            n_max_uav: 100,
            n_max_ugv: 100,
            k_neighbors: 5,
            local_radius: 6.0,
            local_attempts: 20,
            global_attempts: 20,
            slice_heights: vec![0.3, 0.65, 1.0],
            min_blob_cells: crate::frontier::DEFAULT_MIN_BLOB_CELLS,
        }
    }
}

impl SamplingParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.d_min > 0.0 && self.d_min < self.d_max) {
            return bad("sampling requires 0 < d_min < d_max");
        }
        if self.n_max_uav == 0 || self.n_max_ugv == 0 {
            return bad("failure thresholds must be at least 1");
        }
        if self.k_neighbors == 0 || !(self.local_radius > 0.0) {
            return bad("k_neighbors and local_radius must be positive");
        }
        Ok(())
    }
}

/// Layered graph. Node and edge sets only grow.
#[derive(Debug, Clone, Default)]
pub struct Roadmap {
    nodes: Vec<RoadmapNode>,
    edges: Vec<RoadmapEdge>,
    /// Intra-layer adjacency only.
    adj: Vec<Vec<(NodeId, f64)>>,
}

impl Roadmap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[RoadmapNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &RoadmapNode {
        &self.nodes[id]
    }

    pub fn edges(&self) -> &[RoadmapEdge] {
        &self.edges
    }

    pub fn layer_of(&self, id: NodeId) -> Layer {
        self.nodes[id].config.layer
    }

    pub fn layer_nodes(&self, layer: Layer) -> impl Iterator<Item = &RoadmapNode> + '_ {
        self.nodes.iter().filter(move |n| n.config.layer == layer)
    }

    pub fn layer_count(&self, layer: Layer) -> usize {
        self.layer_nodes(layer).count()
    }

    /// Intra-layer neighbours with edge lengths.
    pub fn neighbors(&self, id: NodeId) -> &[(NodeId, f64)] {
        &self.adj[id]
    }

    pub fn adjacency(&self) -> &[Vec<(NodeId, f64)>] {
        &self.adj
    }

    pub fn set_reward(&mut self, id: NodeId, reward: u64, best_yaw: Option<f64>) {
        let n = &mut self.nodes[id];
        n.reward = reward;
        n.best_yaw = best_yaw;
    }

    pub fn mark_scanned(&mut self, id: NodeId, heading: usize) {
        if heading < 64 {
            self.nodes[id].scanned |= 1 << heading;
        }
    }

    /// Nearest same-layer node to `p`, ties to the lower id.
    pub fn nearest(&self, layer: Layer, p: Vec3) -> Option<(NodeId, f64)> {
        self.layer_nodes(layer)
            .map(|n| (n.id, n.config.position.distance(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
    }

    /// The `k` same-layer nodes closest to `p`, nearest first.
    pub fn k_nearest(&self, layer: Layer, p: Vec3, k: usize) -> Vec<NodeId> {
        let mut all: Vec<(NodeId, f64)> = self
            .layer_nodes(layer)
            .map(|n| (n.id, n.config.position.distance(p)))
            .collect();
        all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        all.truncate(k);
        all.into_iter().map(|(id, _)| id).collect()
    }

    pub(crate) fn push_node(&mut self, config: Config, origin: NodeOrigin) -> NodeId {
        let id = self.nodes.len();
        let nn_distance = self.nearest(config.layer, config.position).map(|(_, d)| d);
        self.nodes.push(RoadmapNode {
            id,
            config,
            reward: 0,
            best_yaw: None,
            origin,
            nn_distance,
            rendezvous: None,
            scanned: 0,
        });
        self.adj.push(Vec::new());
        id
    }

    pub(crate) fn push_edge(&mut self, a: NodeId, b: NodeId, kind: EdgeKind) {
        let length = self.nodes[a].config.position.distance(self.nodes[b].config.position);
        self.edges.push(RoadmapEdge { a, b, kind, length });
        if kind == EdgeKind::Rendezvous {
            self.nodes[a].rendezvous = Some(b);
            self.nodes[b].rendezvous = Some(a);
        } else {
            self.adj[a].push((b, length));
            self.adj[b].push((a, length));
        }
    }

    /// Connects `id` to every lower-id node of its layer within `radius` along a free segment.
    pub(crate) fn connect(&mut self, id: NodeId, map: &VoxelMap, bodies: &BodyModel, radius: f64) {
        let cfg = self.nodes[id].config;
        let targets: Vec<NodeId> = self.nodes[..id]
            .iter()
            .filter(|n| n.config.layer == cfg.layer)
            .filter(|n| n.config.position.distance(cfg.position) <= radius)
            .filter(|n| segment_free(map, &cfg, n.config.position, bodies))
            .map(|n| n.id)
            .collect();
        for t in targets {
            self.push_edge(t, id, cfg.layer.into());
        }
    }

    /// Retries every unlinked same-layer pair within `radius`; segments that crossed unknown
    /// space at insertion may be free now. Returns the number of edges added.
    pub(crate) fn reconnect(&mut self, layer: Layer, map: &VoxelMap, bodies: &BodyModel, radius: f64) -> usize {
        let ids: Vec<NodeId> = self.layer_nodes(layer).map(|n| n.id).collect();
        let mut added = 0;
        for (k, &a) in ids.iter().enumerate() {
            let cfg = self.nodes[a].config;
            for &b in &ids[k + 1..] {
                let q = self.nodes[b].config.position;
                if q.distance(cfg.position) > radius || self.adj[a].iter().any(|e| e.0 == b) {
                    continue;
                }
                if segment_free(map, &cfg, q, bodies) {
                    self.push_edge(a, b, layer.into());
                    added += 1;
                }
            }
        }
        added
    }

    /// Inserts a robot pose without spacing or collision checks and links it to nearby
    /// same-layer nodes. An existing node at the same position is reused.
    pub fn insert_anchor(
        &mut self,
        config: Config,
        map: &VoxelMap,
        bodies: &BodyModel,
        radius: f64,
    ) -> NodeId {
        if let Some((id, d)) = self.nearest(config.layer, config.position) {
            if d < 1e-9 {
                return id;
            }
        }
        let id = self.push_node(config, NodeOrigin::Anchor);
        let cfg = config;
        let targets: Vec<NodeId> = self
            .layer_nodes(cfg.layer)
            .filter(|n| n.id != id && n.config.position.distance(cfg.position) <= radius)
            .filter(|n| segment_free(map, &cfg, n.config.position, bodies))
            .map(|n| n.id)
            .collect();
        for t in targets {
            self.push_edge(t, id, cfg.layer.into());
        }
        id
    }

    /// Adds a node without any checks.
    pub fn add_node(&mut self, config: Config) -> NodeId {
        self.push_node(config, NodeOrigin::Anchor)
    }

    /// Adds an intra-layer edge with an explicit length (abstract graphs and tests).
    pub fn add_weighted_edge(&mut self, a: NodeId, b: NodeId, length: f64) -> Result<()> {
        let layer = self.layer_of(a);
        if self.layer_of(b) != layer {
            return Err(Error::WrongLayer(b));
        }
        if !(length > 0.0) {
            return Err(Error::MalformedInstance(format!("edge {a}-{b} has length {length}")));
        }
        self.edges.push(RoadmapEdge { a, b, kind: layer.into(), length });
        self.adj[a].push((b, length));
        self.adj[b].push((a, length));
        Ok(())
    }

    /// Adds a rendezvous edge between an aerial and a ground node sharing `(x, y)`.
    pub fn link_rendezvous(&mut self, uav: NodeId, ugv: NodeId) -> Result<()> {
        let (a, b) = (&self.nodes[uav], &self.nodes[ugv]);
        if a.config.layer != Layer::Uav {
            return Err(Error::WrongLayer(uav));
        }
        if b.config.layer != Layer::Ugv {
            return Err(Error::WrongLayer(ugv));
        }
        if a.config.position.x != b.config.position.x || a.config.position.y != b.config.position.y {
            return Err(Error::InvalidParameter(format!(
                "nodes {uav} and {ugv} do not share (x, y)"
            )));
        }
        if a.rendezvous == Some(ugv) {
            return Ok(());
        }
        self.push_edge(uav, ugv, EdgeKind::Rendezvous);
        Ok(())
    }

    /// Shortest intra-layer path; see [`shortest_path`].
    pub fn shortest_path(&self, layer: Layer, from: NodeId, to: NodeId) -> Result<(Vec<NodeId>, f64)> {
        shortest_path(self, layer, from, to)
    }

    /// Single-source distances restricted to `layer`.
    pub fn paths_from(&self, layer: Layer, from: NodeId) -> Result<ShortestPaths> {
        if from >= self.len() || self.layer_of(from) != layer {
            return Err(Error::WrongLayer(from));
        }
        Ok(ShortestPaths::compute(&self.adj, from, |_| true))
    }

    pub fn export(&self) -> RoadmapExport {
        RoadmapExport {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeRecord {
                    id: n.id,
                    layer: n.config.layer,
                    x: n.config.position.x,
                    y: n.config.position.y,
                    z: n.config.position.z,
                    yaw: n.best_yaw.unwrap_or(n.config.yaw),
                    reward: n.reward,
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }
}

/// Minimal-length path over the edges of `layer`; equal lengths resolve to the
/// lexicographically smallest node sequence.
pub fn shortest_path(g: &Roadmap, layer: Layer, from: NodeId, to: NodeId) -> Result<(Vec<NodeId>, f64)> {
    for id in [from, to] {
        if id >= g.len() || g.layer_of(id) != layer {
            return Err(Error::WrongLayer(id));
        }
    }
    let sp = g.paths_from(layer, from)?;
    match sp.path_to(to) {
        Some(p) => Ok((p, sp.dist(to))),
        None => Err(Error::NoPath { from, to }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub layer: Layer,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    pub reward: u64,
}

/// Flat node and edge records for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadmapExport {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<RoadmapEdge>,
}
