//! Per-tour coupled planning: candidate harvesting, collect-pair selection under both
//! robots' distance budgets, the two orienteering solves, and the fallback relocation.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ShortestPaths;
use crate::grid_map::{best_heading, Layer, SensorModel, VoxelMap};
use crate::op_solver::{solve_op, OpEdge, OpInstance, OpNode, Tour};
use crate::roadmap::{NodeId, Roadmap};

pub const DEFAULT_CAND_CAP: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RendezvousPair {
    pub ground: NodeId,
    pub aerial: NodeId,
    pub utility: f64,
}

/// Distance budgets in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub uav: f64,
    pub ugv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourPlan {
    pub sigma_uav: Option<Tour>,
    pub sigma_ugv: Tour,
    pub collect: Option<RendezvousPair>,
    pub fallback: bool,
}

impl TourPlan {
    /// Fallback in which the UGV does not move.
    pub fn is_stay(&self) -> bool {
        self.fallback && self.sigma_ugv.nodes.len() <= 1
    }
}

/// `gain * exp(-lambda * dist_ugv)`.
pub fn pair_utility(gain: f64, dist_ugv: f64, lambda: f64) -> f64 {
    if gain == 0.0 {
        return 0.0;
    }
    gain * (-lambda * dist_ugv).exp()
}

/// Recomputes node rewards of one layer over the headings not yet scanned at each node. A node
/// whose gain reached zero stays at zero: gains never grow as the map fills in.
pub fn refresh_rewards(g: &mut Roadmap, map: &VoxelMap, layer: Layer, sensor: &SensorModel) -> Result<()> {
    let ids: Vec<NodeId> = g.layer_nodes(layer).map(|n| n.id).collect();
    for id in ids {
        let n = g.node(id);
        if n.reward == 0 && n.best_yaw.is_some() {
            continue;
        }
        let (gain, yaw) = if sensor.is_directional() {
            let gains = map.yaw_gains(n.config.position, sensor)?;
            match best_heading(&gains, sensor, !n.scanned) {
                Some(b) => (b.gain, b.yaw),
                None => (0, n.config.yaw),
            }
        } else if n.scanned & 1 == 1 {
            (0, n.config.yaw)
        } else {
            (map.reward(n.config.position, sensor)?.gain, n.config.yaw)
        };
        g.set_reward(id, gain, Some(yaw));
    }
    Ok(())
}

/// Refreshes aerial rewards and returns aerial nodes with positive reward and a rendezvous
/// partner, best first (ties to lower id), truncated to `cand_cap`.
pub fn candidate_set(g: &mut Roadmap, map: &VoxelMap, sensor_uav: &SensorModel, cand_cap: usize) -> Result<Vec<NodeId>> {
    refresh_rewards(g, map, Layer::Uav, sensor_uav)?;
    let mut c: Vec<(u64, NodeId)> = g
        .layer_nodes(Layer::Uav)
        .filter(|n| n.reward > 0 && n.rendezvous.is_some())
        .map(|n| (n.reward, n.id))
        .collect();
    c.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    c.truncate(cand_cap);
    Ok(c.into_iter().map(|(_, id)| id).collect())
}

/// Orienteering instance over the `layer` nodes that can lie on a budget-feasible
/// `start -> end` path; rewards are the stored node rewards.
pub fn layer_instance(g: &Roadmap, layer: Layer, start: NodeId, end: NodeId, budget: f64) -> Result<OpInstance> {
    let from = g.paths_from(layer, start)?;
    let to = g.paths_from(layer, end)?;
    let keep: BTreeSet<NodeId> = g
        .layer_nodes(layer)
        .filter(|n| from.dist(n.id) + to.dist(n.id) <= budget * (1.0 + 1e-12) + 1e-9)
        .map(|n| n.id)
        .chain([start, end])
        .collect();
    let nodes = keep
        .iter()
        .map(|&id| OpNode { id, reward: g.node(id).reward as f64 })
        .collect();
    let mut edges = Vec::new();
    for &a in &keep {
        for &(b, length) in g.neighbors(a) {
            if a < b && keep.contains(&b) {
                edges.push(OpEdge { a, b, length });
            }
        }
    }
    Ok(OpInstance { start, end, budget, nodes, edges })
}

fn path_tour(g: &Roadmap, nodes: Vec<NodeId>, length: f64) -> Tour {
    let total_reward = nodes.iter().fold(0.0, |acc, &v| acc + g.node(v).reward as f64);
    Tour { nodes, total_length: length, total_reward }
}

/// Checks that the pair names an aerial and a ground node joined by a rendezvous edge.
pub fn check_release(g: &Roadmap, release: &RendezvousPair) -> Result<()> {
    let ok = release.aerial < g.len()
        && release.ground < g.len()
        && g.layer_of(release.aerial) == Layer::Uav
        && g.layer_of(release.ground) == Layer::Ugv
        && g.node(release.aerial).rendezvous == Some(release.ground);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidRelease(format!(
            "aerial {} / ground {} are not a rendezvous pair",
            release.aerial, release.ground
        )))
    }
}

/// Plans one tour. Node rewards of both layers must be fresh.
pub fn plan_tour_pair<R: Rng + ?Sized>(
    g: &Roadmap,
    release: &RendezvousPair,
    candidates: &[NodeId],
    budgets: Budgets,
    lambda: f64,
    rng: &mut R,
) -> Result<TourPlan> {
    check_release(g, release)?;
    let sp_uav = g.paths_from(Layer::Uav, release.aerial)?;
    let sp_ugv = g.paths_from(Layer::Ugv, release.ground)?;

    // (utility, gain, dist_ugv, aerial id, ground id)
    let mut best: Option<(f64, u64, f64, NodeId, NodeId)> = None;
    for &c in candidates {
        let Some(ground) = g.node(c).rendezvous else { continue };
        let (du, dg) = (sp_uav.dist(c), sp_ugv.dist(ground));
        if !(du <= budgets.uav && dg <= budgets.ugv) {
            continue;
        }
        let gain = g.node(c).reward;
        let u = pair_utility(gain as f64, dg, lambda);
        let better = match best {
            None => true,
            Some((bu, bg, bd, bid, _)) => {
                u > bu || (u == bu && (gain > bg || (gain == bg && (dg < bd || (dg == bd && c < bid)))))
            }
        };
        if better {
            best = Some((u, gain, dg, c, ground));
        }
    }

    if let Some((utility, _, _, aerial, ground)) = best {
        let ugv_inst = layer_instance(g, Layer::Ugv, release.ground, ground, budgets.ugv)?;
        let uav_inst = layer_instance(g, Layer::Uav, release.aerial, aerial, budgets.uav)?;
        let sigma_ugv = solve_op(&ugv_inst, rng)?;
        let sigma_uav = solve_op(&uav_inst, rng)?;
        return Ok(TourPlan {
            sigma_uav: Some(sigma_uav),
            sigma_ugv,
            collect: Some(RendezvousPair { ground, aerial, utility }),
            fallback: false,
        });
    }

    fallback_plan(g, release.ground, Some(release.aerial), &sp_ugv)
}

/// Fallback branch: the UAV stays docked and the UGV relocates toward the highest-gain
/// node whose ground target it can reach, or stays put when there is none.
pub fn fallback_plan(
    g: &Roadmap,
    ground: NodeId,
    aerial: Option<NodeId>,
    sp_ugv: &ShortestPaths,
) -> Result<TourPlan> {
    let mut ranked: Vec<(u64, NodeId)> = g.nodes().iter().filter(|n| n.reward > 0).map(|n| (n.reward, n.id)).collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, id) in ranked {
        let target = match g.layer_of(id) {
            Layer::Ugv => id,
            Layer::Uav => match g.node(id).rendezvous {
                Some(gid) => gid,
                None => {
                    let p = g.node(id).config.position;
                    let below = crate::Vec3::new(p.x, p.y, g.node(ground).config.position.z);
                    match g.nearest(Layer::Ugv, below) {
                        Some((gid, _)) => gid,
                        None => continue,
                    }
                }
            },
        };
        if target == ground || !sp_ugv.reachable(target) {
            continue;
        }
        let path = sp_ugv.path_to(target).expect("reachable");
        return Ok(TourPlan {
            sigma_uav: None,
            sigma_ugv: path_tour(g, path, sp_ugv.dist(target)),
            collect: None,
            fallback: true,
        });
    }
    Ok(TourPlan {
        sigma_uav: None,
        sigma_ugv: path_tour(g, vec![ground], 0.0),
        collect: aerial.map(|aerial| RendezvousPair { ground, aerial, utility: 0.0 }),
        fallback: true,
    })
}

/// Waypoints and leg lengths per robot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourPlanExport {
    pub uav_waypoints: Vec<[f64; 3]>,
    pub uav_legs: Vec<f64>,
    pub ugv_waypoints: Vec<[f64; 3]>,
    pub ugv_legs: Vec<f64>,
    pub collect: Option<RendezvousPair>,
    pub fallback: bool,
}

impl TourPlan {
    pub fn export(&self, g: &Roadmap) -> TourPlanExport {
        let pts = |t: &Tour| -> (Vec<[f64; 3]>, Vec<f64>) {
            let w: Vec<[f64; 3]> = t
                .nodes
                .iter()
                .map(|&v| {
                    let p = g.node(v).config.position;
                    [p.x, p.y, p.z]
                })
                .collect();
            let legs = t
                .nodes
                .windows(2)
                .map(|p| g.node(p[0]).config.position.distance(g.node(p[1]).config.position))
                .collect();
            (w, legs)
        };
        let (uav_waypoints, uav_legs) = self.sigma_uav.as_ref().map(pts).unwrap_or_default();
        let (ugv_waypoints, ugv_legs) = pts(&self.sigma_ugv);
        TourPlanExport {
            uav_waypoints,
            uav_legs,
            ugv_waypoints,
            ugv_legs,
            collect: self.collect,
            fallback: self.fallback,
        }
    }
}
