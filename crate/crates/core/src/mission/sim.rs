use serde::{Deserialize, Serialize};

use super::{Attribution, MissionConfig, RegionAttribution};
use crate::coordination::TourPlan;
use crate::error::{Error, Result};
use crate::grid_map::{Config, Layer, Occupancy, SensorModel, VoxelMap, WorldModel};
use crate::op_solver::Tour;
use crate::roadmap::Roadmap;


/// Who first mapped a voxel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mapper {
    Prior,
    Uav,
    Ugv,
}

/// How the two robots' motions compose in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    /// Both move at once; the tour lasts `max(tau_a, tau_g)`.
    Concurrent,
    /// The UGV drives first, then the UAV flies; the tour lasts `tau_g + tau_a`.
    Sequential,
}

/// Result of executing one plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub tau_a: f64,
    pub tau_g: f64,
    pub uav_length: f64,
    pub ugv_length: f64,
    pub newly_uav: usize,
    pub newly_ugv: usize,
    /// Every scan in time order.
    pub events: Vec<ScanEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanEvent {
    /// Seconds since the tour started.
    pub t: f64,
    pub by: Mapper,
    pub newly: usize,
    /// Coverage right after the scan.
    pub coverage: f64,
}

impl Execution {
    pub fn duration(&self, timing: Timing) -> f64 {
        match timing {
            Timing::Concurrent => self.tau_a.max(self.tau_g),
            Timing::Sequential => self.tau_a + self.tau_g,
        }
    }
}

/// Ground truth plus the shared map being built, with first-mapper bookkeeping.
#[derive(Debug, Clone)]
pub struct Simulation<'w> {
    world: &'w WorldModel,
    map: VoxelMap,
    mapper: Vec<Option<Mapper>>,
    known_reachable: usize,
    reachable_total: usize,
    sensor_uav: SensorModel,
    sensor_ugv: SensorModel,
    v_uav: f64,
    v_ugv: f64,
    scan_spacing: f64,
    takeoff_landing_cost: f64,
}

impl<'w> Simulation<'w> {
    /// Voxels already known in `map` count as prior knowledge.
    pub fn new(world: &'w WorldModel, map: VoxelMap, cfg: &MissionConfig) -> Result<Self> {
        if map.dims() != world.dims() {
            return Err(Error::ShapeError { map: map.dims().as_array(), world: world.dims().as_array() });
        }
        let mapper: Vec<Option<Mapper>> =
            map.cells().iter().map(|&c| (c != Occupancy::Unknown).then_some(Mapper::Prior)).collect();
        let reachable_total = world.reachable_count();
        let known_reachable = (0..mapper.len()).filter(|&i| mapper[i].is_some() && world.is_reachable(i)).count();
        Ok(Self {
            world,
            map,
            mapper,
            known_reachable,
            reachable_total,
            sensor_uav: cfg.sensor_uav.clone(),
            sensor_ugv: cfg.sensor_ugv.clone(),
            v_uav: cfg.v_uav,
            v_ugv: cfg.v_ugv,
            scan_spacing: cfg.scan_spacing,
            takeoff_landing_cost: cfg.takeoff_landing_cost,
        })
    }

    pub fn world(&self) -> &'w WorldModel {
        self.world
    }

    pub fn map(&self) -> &VoxelMap {
        &self.map
    }

    pub fn into_map(self) -> VoxelMap {
        self.map
    }

    pub fn mapper(&self, idx: usize) -> Option<Mapper> {
        self.mapper[idx]
    }

    pub fn coverage(&self) -> f64 {
        if self.reachable_total == 0 {
            1.0
        } else {
            self.known_reachable as f64 / self.reachable_total as f64
        }
    }

    fn record(&mut self, idx: usize, who: Mapper) {
        debug_assert!(self.mapper[idx].is_none());
        self.mapper[idx] = Some(who);
        if self.world.is_reachable(idx) {
            self.known_reachable += 1;
        }
    }

    /// Labels free every unknown voxel in `cells` as prior knowledge (space the robots occupy).
    /// Fails if any of them is occupied in the world.
    pub fn claim_body_space(&mut self, cells: &[usize]) -> Result<()> {
        for &i in cells {
            if self.world.is_occupied(i) {
                let c = self.world.grid().center(i);
                return Err(Error::InvalidScenario(format!(
                    "start pose overlaps an obstacle near ({:.2}, {:.2}, {:.2})",
                    c.x, c.y, c.z
                )));
            }
        }
        for &i in cells {
            if self.map.get(i) == Occupancy::Unknown {
                self.map.set(i, Occupancy::Free);
                self.record(i, Mapper::Prior);
            }
        }
        Ok(())
    }

    /// Copies the true label of every unknown voxel in `cells` into the map as prior knowledge.
    pub fn claim_prior(&mut self, cells: &[usize]) {
        for &i in cells {
            if self.map.get(i) == Occupancy::Unknown {
                let label = if self.world.is_occupied(i) { Occupancy::Occupied } else { Occupancy::Free };
                self.map.set(i, label);
                self.record(i, Mapper::Prior);
            }
        }
    }

    pub fn scan(&mut self, layer: Layer, cfg: &Config) -> Result<usize> {
        let (sensor, who) = match layer {
            Layer::Uav => (&self.sensor_uav, Mapper::Uav),
            Layer::Ugv => (&self.sensor_ugv, Mapper::Ugv),
        };
        let mut fresh = Vec::new();
        let n = self.map.integrate_scan_with(self.world, cfg, sensor, |i| fresh.push(i))?;
        for i in fresh {
            self.record(i, who);
        }
        Ok(n)
    }

    /// Scan poses along a path: every `scan_spacing` meters inside each edge (yaw = heading)
    /// and at every node after the first (aerial nodes face their best yaw). An aerial path
    /// also scans at takeoff.
    fn schedule(&self, g: &Roadmap, nodes: &[usize], speed: f64) -> Result<Vec<(f64, Config)>> {
        for &v in nodes {
            if v >= g.len() {
                return Err(Error::StalePlan(v));
            }
        }
        let mut out = Vec::new();
        let mut dist = 0.0;
        let first = g.node(nodes[0]);
        let mut heading = first.config.yaw;
        if first.config.layer == Layer::Uav {
            let yaw = first.best_yaw.unwrap_or(heading);
            out.push((0.0, Config::new(first.config.position, yaw, Layer::Uav)));
        }
        for w in nodes.windows(2) {
            let (a, b) = (g.node(w[0]), g.node(w[1]));
            let Some(&(_, len)) = g.neighbors(w[0]).iter().find(|e| e.0 == w[1]) else {
                return Err(Error::StalePlan(w[1]));
            };
            let (p, q) = (a.config.position, b.config.position);
            if (q.x - p.x).hypot(q.y - p.y) > 1e-9 {
                heading = (q.y - p.y).atan2(q.x - p.x);
            }
            let mut k = 1.0;
            while k * self.scan_spacing < len - 1e-9 {
                let s = k * self.scan_spacing;
                let pos = p.lerp(q, s / len);
                out.push(((dist + s) / speed, Config::new(pos, heading, a.config.layer)));
                k += 1.0;
            }
            dist += len;
            let yaw = b.best_yaw.filter(|_| b.config.layer == Layer::Uav).unwrap_or(heading);
            out.push((dist / speed, Config::new(q, yaw, b.config.layer)));
        }
        Ok(out)
    }

    /// Drives both robots along a plan, integrating scans in time order.
    pub fn execute_paths(&mut self, g: &Roadmap, plan: &TourPlan, timing: Timing) -> Result<Execution> {
        self.execute_tours(g, plan.sigma_uav.as_ref(), Some(&plan.sigma_ugv), timing)
    }

    pub fn execute_tours(
        &mut self,
        g: &Roadmap,
        uav: Option<&Tour>,
        ugv: Option<&Tour>,
        timing: Timing,
    ) -> Result<Execution> {
        let uav_sched = match uav {
            Some(t) => self.schedule(g, &t.nodes, self.v_uav)?,
            None => Vec::new(),
        };
        let ugv_sched = match ugv {
            Some(t) if t.nodes.len() > 1 => self.schedule(g, &t.nodes, self.v_ugv)?,
            _ => Vec::new(),
        };
        let uav_length = uav.map_or(0.0, |t| t.total_length);
        let ugv_length = ugv.map_or(0.0, |t| t.total_length);
        let tau_a = if uav_length == 0.0 { 0.0 } else { (uav_length + self.takeoff_landing_cost) / self.v_uav };
        let tau_g = ugv_length / self.v_ugv;
        let uav_offset = match timing {
            Timing::Concurrent => 0.0,
            Timing::Sequential => tau_g,
        };
        let mut events: Vec<(f64, u8, Config)> = uav_sched
            .into_iter()
            .map(|(t, c)| (t + uav_offset, 0, c))
            .chain(ugv_sched.into_iter().map(|(t, c)| (t, 1, c)))
            .collect();
        // Simultaneous scans: the UAV first when concurrent, the parked UGV first when sequential.
        let rank = |who: u8| if timing == Timing::Sequential { 1 - who } else { who };
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(rank(a.1).cmp(&rank(b.1))));
        let mut ex = Execution { tau_a, tau_g, uav_length, ugv_length, newly_uav: 0, newly_ugv: 0, events: Vec::new() };
        for (t, who, cfg) in events {
            let n = self.scan(cfg.layer, &cfg)?;
            let by = if who == 0 {
                ex.newly_uav += n;
                Mapper::Uav
            } else {
                ex.newly_ugv += n;
                Mapper::Ugv
            };
            ex.events.push(ScanEvent { t, by, newly: n, coverage: self.coverage() });
        }
        Ok(ex)
    }

    pub fn attribution(&self) -> Attribution {
        let mut a = Attribution::default();
        for m in self.mapper.iter().flatten() {
            match m {
                Mapper::Prior => a.prior += 1,
                Mapper::Uav => a.uav += 1,
                Mapper::Ugv => a.ugv += 1,
            }
        }
        a
    }

    /// Attribution restricted to each named region of the world (reachable voxels only).
    pub fn region_attribution(&self) -> Vec<RegionAttribution> {
        let grid = *self.world.grid();
        self.world
            .regions()
            .iter()
            .map(|r| {
                let mut counts = Attribution::default();
                let mut voxels = 0;
                for i in 0..grid.dims.len() {
                    if !self.world.is_reachable(i) || !r.contains(grid.center(i)) {
                        continue;
                    }
                    voxels += 1;
                    match self.mapper[i] {
                        Some(Mapper::Prior) => counts.prior += 1,
                        Some(Mapper::Uav) => counts.uav += 1,
                        Some(Mapper::Ugv) => counts.ugv += 1,
                        None => {}
                    }
                }
                RegionAttribution { name: r.name.clone(), voxels, counts }
            })
            .collect()
    }
}

/// Voxels overlapped by an upright cylinder `[z0, z1]` of radius `rad` at `(x, y)`.
pub(crate) fn cylinder_cells(grid: &crate::Grid, x: f64, y: f64, rad: f64, z0: f64, z1: f64) -> Vec<usize> {
    let r = grid.resolution;
    let mut out = Vec::new();
    let lo = |v: f64| ((v + 1e-9) / r).floor() as i64;
    let hi = |v: f64| ((v - 1e-9) / r).floor() as i64;
    for k in lo(z0)..=hi(z1) {
        for j in lo(y - rad)..=hi(y + rad) {
            for i in lo(x - rad)..=hi(x + rad) {
                let cx = x.clamp(i as f64 * r, (i + 1) as f64 * r);
                let cy = y.clamp(j as f64 * r, (j + 1) as f64 * r);
                if (x - cx).hypot(y - cy) >= rad - 1e-9 {
                    continue;
                }
                if grid.dims.contains_signed([i, j, k]) {
                    out.push(grid.dims.index(i as usize, j as usize, k as usize));
                }
            }
        }
    }
    out
}

