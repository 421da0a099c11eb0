use rand::Rng;

use super::{
    is_config_free, project_config, validate_rendezvous_edge, BodyModel, NodeId, NodeOrigin,
    Roadmap, SamplingParams,
};
use crate::frontier::{detect_frontiers, weighted_sample_frontier, FrontierCircle};
use crate::grid_map::{Config, Layer, Occupancy, VoxelMap, WorldModel};
use crate::Vec3;

/// Per-call counts of what the expansion added.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExpandStats {
    pub frontier_uav: usize,
    pub frontier_ugv: usize,
    pub local_uav: usize,
    pub local_ugv: usize,
    pub global_uav: usize,
    pub global_ugv: usize,
    pub projected: usize,
    pub failures_uav: usize,
    pub failures_ugv: usize,
    /// Edges added between existing nodes once their segment became known free.
    pub reconnected: usize,
}

impl ExpandStats {
    pub fn added(&self) -> usize {
        self.frontier_uav
            + self.frontier_ugv
            + self.local_uav
            + self.local_ugv
            + self.global_uav
            + self.global_ugv
            + self.projected
    }
}

struct Ctx<'a> {
    map: &'a VoxelMap,
    world: &'a WorldModel,
    params: &'a SamplingParams,
    bodies: &'a BodyModel,
}

impl Ctx<'_> {
    fn config_at(&self, layer: Layer, p: Vec3) -> Config {
        match layer {
            Layer::Uav => Config::aerial(p.x, p.y, p.z, 0.0),
            Layer::Ugv => Config::ground(p.x, p.y, self.world.ground_height(p.x, p.y)),
        }
    }

    fn valid(&self, cfg: &Config) -> bool {
        let z = cfg.position.z;
        let in_band = cfg.layer == Layer::Ugv
            || (z >= self.bodies.altitude_min && z <= self.bodies.altitude_max);
        in_band && is_config_free(self.map, cfg, self.bodies)
    }

    /// Spacing rule: the nearest same-layer node must lie in `[d_min, d_max]`.
    /// An empty layer accepts any candidate.
    fn spaced(&self, g: &Roadmap, cfg: &Config) -> bool {
        match g.nearest(cfg.layer, cfg.position) {
            None => true,
            Some((_, d)) => d >= self.params.d_min && d <= self.params.d_max,
        }
    }

    fn try_insert(&self, g: &mut Roadmap, cfg: Config, origin: NodeOrigin) -> Option<NodeId> {
        (self.valid(&cfg) && self.spaced(g, &cfg)).then(|| g.push_node(cfg, origin))
    }

    fn frontier_stage<R: Rng + ?Sized>(
        &self,
        g: &mut Roadmap,
        layer: Layer,
        frontiers: &[FrontierCircle],
        rng: &mut R,
    ) -> (usize, usize) {
        let n_max = match layer {
            Layer::Uav => self.params.n_max_uav,
            Layer::Ugv => self.params.n_max_ugv,
        };
        let (mut added, mut fails) = (0, 0);
        while fails < n_max {
            let Ok(f) = weighted_sample_frontier(frontiers, rng) else {
                break;
            };
            let target = match layer {
                Layer::Uav => Vec3::new(
                    f.center[0],
                    f.center[1],
                    f.z.clamp(self.bodies.altitude_min, self.bodies.altitude_max),
                ),
                Layer::Ugv => {
                    Vec3::new(f.center[0], f.center[1], self.world.ground_height(f.center[0], f.center[1]))
                }
            };
            let near = g.k_nearest(layer, target, self.params.k_neighbors);
            if near.is_empty() {
                break;
            }
            for id in near {
                let from = g.node(id).config.position;
                let dir = target - from;
                let len = dir.norm();
                let step = rng.gen_range(self.params.d_min..=self.params.d_max);
                if len < 1e-9 {
                    fails += 1;
                    continue;
                }
                let cfg = self.config_at(layer, from + dir * (step / len));
                // Collision rejections count as failures so the loop is bounded.
                match self.try_insert(g, cfg, NodeOrigin::Frontier) {
                    Some(_) => added += 1,
                    None => fails += 1,
                }
            }
        }
        (added, fails)
    }

    fn local_stage<R: Rng + ?Sized>(&self, g: &mut Roadmap, robot: &Config, rng: &mut R) -> usize {
        let rad = self.params.local_radius;
        let mut added = 0;
        for _ in 0..self.params.local_attempts {
            let off = loop {
                let v = Vec3::new(
                    rng.gen_range(-1.0..=1.0),
                    rng.gen_range(-1.0..=1.0),
                    if robot.layer == Layer::Uav { rng.gen_range(-1.0..=1.0) } else { 0.0 },
                );
                if v.norm() <= 1.0 {
                    break v * rad;
                }
            };
            let cfg = self.config_at(robot.layer, robot.position + off);
            if self.try_insert(g, cfg, NodeOrigin::Local).is_some() {
                added += 1;
            }
        }
        added
    }

    fn global_stage<R: Rng + ?Sized>(&self, g: &mut Roadmap, layer: Layer, rng: &mut R) -> usize {
        let grid = self.map.grid();
        let r = grid.resolution;
        let ground_k = |p: Vec3| (self.world.ground_height(p.x, p.y) / r).floor() as usize;
        let pool: Vec<usize> = (0..grid.dims.len())
            .filter(|&i| self.map.get(i) == Occupancy::Free)
            .filter(|&i| {
                let c = grid.center(i);
                match layer {
                    Layer::Uav => {
                        c.z + 0.5 * r >= self.bodies.altitude_min && c.z - 0.5 * r <= self.bodies.altitude_max
                    }
                    Layer::Ugv => grid.dims.coords(i)[2] == ground_k(c),
                }
            })
            .collect();
        if pool.is_empty() {
            return 0;
        }
        let mut added = 0;
        for _ in 0..self.params.global_attempts {
            let c = grid.center(pool[rng.gen_range(0..pool.len())]);
            let jitter = |rng: &mut R| rng.gen_range(-0.5..0.5) * r;
            let p = Vec3::new(c.x + jitter(rng), c.y + jitter(rng), c.z + jitter(rng));
            let cfg = self.config_at(layer, p);
            if self.try_insert(g, cfg, NodeOrigin::Global).is_some() {
                added += 1;
            }
        }
        added
    }

    fn project_all(&self, g: &mut Roadmap) -> usize {
        let pending: Vec<NodeId> = g
            .layer_nodes(Layer::Uav)
            .filter(|n| n.rendezvous.is_none())
            .map(|n| n.id)
            .collect();
        let mut added = 0;
        for id in pending {
            let up = g.node(id).config;
            let Some(down) = project_config(&up, self.map, self.world, self.bodies) else {
                continue;
            };
            if !validate_rendezvous_edge(self.map, &up, &down) {
                continue;
            }
            let gid = g.push_node(down, NodeOrigin::Projection);
            g.push_edge(id, gid, super::EdgeKind::Rendezvous);
            added += 1;
        }
        added
    }
}

/// Grows the roadmap in place following the dual-layer sampling procedure:
/// aerial frontier/local/global stages and edge connection, projection of aerial nodes with
/// rendezvous edges, then the ground stages and ground edge connection.
///
/// Only `ground_height` is read from `world`; every free-space test uses `map`.
#[allow(clippy::too_many_arguments)]
pub fn expand_roadmap<R: Rng + ?Sized>(
    g: &mut Roadmap,
    map: &VoxelMap,
    world: &WorldModel,
    cfg_uav: &Config,
    cfg_ugv: &Config,
    params: &SamplingParams,
    bodies: &BodyModel,
    rng: &mut R,
) -> ExpandStats {
    expand_layers(g, map, world, cfg_uav, Some(cfg_ugv), params, bodies, rng)
}

/// As [`expand_roadmap`]; with `cfg_ugv = None` only the aerial layer grows.
#[allow(clippy::too_many_arguments)]
pub fn expand_layers<R: Rng + ?Sized>(
    g: &mut Roadmap,
    map: &VoxelMap,
    world: &WorldModel,
    cfg_uav: &Config,
    cfg_ugv: Option<&Config>,
    params: &SamplingParams,
    bodies: &BodyModel,
    rng: &mut R,
) -> ExpandStats {
    let ctx = Ctx { map, world, params, bodies };
    let frontiers = detect_frontiers(map, &params.slice_heights, params.min_blob_cells);
    let mut st = ExpandStats::default();

    let first_uav = g.len();
    (st.frontier_uav, st.failures_uav) = ctx.frontier_stage(g, Layer::Uav, &frontiers, rng);
    st.local_uav = ctx.local_stage(g, cfg_uav, rng);
    st.global_uav = ctx.global_stage(g, Layer::Uav, rng);
    for id in first_uav..g.len() {
        g.connect(id, map, bodies, params.d_max);
    }
    st.reconnected = g.reconnect(Layer::Uav, map, bodies, params.d_max);

    let Some(cfg_ugv) = cfg_ugv else {
        return st;
    };
    let first_ugv = g.len();
    st.projected = ctx.project_all(g);
    (st.frontier_ugv, st.failures_ugv) = ctx.frontier_stage(g, Layer::Ugv, &frontiers, rng);
    st.local_ugv = ctx.local_stage(g, cfg_ugv, rng);
    st.global_ugv = ctx.global_stage(g, Layer::Ugv, rng);
    for id in first_ugv..g.len() {
        g.connect(id, map, bodies, params.d_max);
    }
    st.reconnected += g.reconnect(Layer::Ugv, map, bodies, params.d_max);
    st
}
