use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sim::{cylinder_cells, Execution, ScanEvent, Simulation, Timing};
use super::{MissionConfig, MissionLog, SeriesPoint, StopReason, Strategy, TourRecord, ComputeClock};
use crate::coordination::{
    candidate_set, fallback_plan, layer_instance, plan_tour_pair, refresh_rewards, Budgets,
    RendezvousPair, TourPlan,
};
use crate::error::{Error, Result};
use crate::grid_map::{Config, Layer, SensorModel, VoxelMap, WorldModel};
use crate::op_solver::{solve_op, Tour};
use crate::roadmap::{expand_layers, is_config_free, validate_rendezvous_edge, NodeId, Roadmap};

const ORTHOGONAL_YAWS: [f64; 4] = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];

/// Final state of a mission.
#[derive(Debug, Clone)]
pub struct MissionOutcome {
    pub map: VoxelMap,
    pub log: MissionLog,
    pub roadmap: Roadmap,
}

/// Runs the strategy named in `cfg` from an empty map.
pub fn run(cfg: &MissionConfig, world: &WorldModel) -> Result<MissionOutcome> {
    run_with_map(cfg, world, VoxelMap::for_world(world))
}

/// Coupled strategy regardless of `cfg.strategy`.
pub fn run_mission(cfg: &MissionConfig, world: &WorldModel) -> Result<MissionOutcome> {
    run(&MissionConfig { strategy: Strategy::Proposed, ..cfg.clone() }, world)
}

pub fn run_uav_only(cfg: &MissionConfig, world: &WorldModel) -> Result<MissionOutcome> {
    run(&MissionConfig { strategy: Strategy::UavOnly, ..cfg.clone() }, world)
}

pub fn run_terra_seq(cfg: &MissionConfig, world: &WorldModel) -> Result<MissionOutcome> {
    run(&MissionConfig { strategy: Strategy::TerraSeq, ..cfg.clone() }, world)
}

/// Runs the strategy named in `cfg`, starting from `map` (its known voxels count as prior).
pub fn run_with_map(cfg: &MissionConfig, world: &WorldModel, map: VoxelMap) -> Result<MissionOutcome> {
    cfg.validate()?;
    let mut m = Mission::start(cfg, world, map)?;
    let stop = loop {
        if m.sim.coverage() >= cfg.coverage_target {
            break StopReason::CoverageReached;
        }
        if m.t_total >= cfg.wall_time_cap {
            break StopReason::TimeCap;
        }
        if m.log_tours.len() >= cfg.max_tours {
            break StopReason::TourCap;
        }
        let idle = match cfg.strategy {
            Strategy::Proposed => m.tour_proposed()?,
            Strategy::UavOnly => m.tour_uav_only()?,
            Strategy::TerraSeq => m.tour_terra()?,
        };
        m.idle_streak = if idle { m.idle_streak + 1 } else { 0 };
        if m.idle_streak >= 2 {
            break StopReason::Stagnation;
        }
    };
    Ok(m.finish(stop))
}

struct Mission<'a> {
    cfg: &'a MissionConfig,
    sim: Simulation<'a>,
    g: Roadmap,
    rng: ChaCha8Rng,
    ground: NodeId,
    aerial: Option<NodeId>,
    /// Aerial home node for the UAV-only baseline.
    home: NodeId,
    t_exp: f64,
    t_total: f64,
    log_tours: Vec<TourRecord>,
    series: Vec<SeriesPoint>,
    idle_streak: usize,
    clock: Option<Instant>,
}

impl<'a> Mission<'a> {
    fn start(cfg: &'a MissionConfig, world: &'a WorldModel, map: VoxelMap) -> Result<Self> {
        let mut sim = Simulation::new(world, map, cfg)?;
        let [x, y] = cfg.start;
        let gh = world.ground_height(x, y);
        let b = &cfg.bodies;
        let grid = *world.grid();
        if !grid.contains(crate::Vec3::new(x, y, cfg.takeoff_altitude)) {
            return Err(Error::InvalidScenario(format!("start ({x}, {y}) or takeoff altitude outside the world")));
        }
        // The docked robots and the takeoff column occupy known free space.
        let mut cells = cylinder_cells(&grid, x, y, b.ugv_radius.max(b.uav_radius), gh, gh + b.ugv_height);
        cells.extend(cylinder_cells(&grid, x, y, b.uav_radius, gh, cfg.takeoff_altitude + b.uav_radius));
        sim.claim_body_space(&cells)?;
        sim.claim_prior(&cylinder_cells(&grid, x, y, cfg.prior_radius, gh, cfg.takeoff_altitude + cfg.prior_radius));

        let ground_cfg = Config::ground(x, y, gh);
        let aerial_cfg = Config::aerial(x, y, cfg.takeoff_altitude, 0.0);
        if !is_config_free(sim.map(), &ground_cfg, b) || !is_config_free(sim.map(), &aerial_cfg, b) {
            return Err(Error::InvalidScenario("start pose is not collision-free".into()));
        }
        let mut g = Roadmap::new();
        let d = cfg.sampling.d_max;
        let ground = g.insert_anchor(ground_cfg, sim.map(), b, d);
        let aerial = g.insert_anchor(aerial_cfg, sim.map(), b, d);
        g.link_rendezvous(aerial, ground)?;

        // Takeoff sweep: four orthogonal headings, or one scan for an omnidirectional sensor.
        let yaws: &[f64] = if cfg.sensor_uav.is_directional() { &ORTHOGONAL_YAWS } else { &[0.0] };
        for &yaw in yaws {
            sim.scan(Layer::Uav, &Config::aerial(x, y, cfg.takeoff_altitude, yaw))?;
            if let Some(k) = heading_index(&cfg.sensor_uav, yaw) {
                g.mark_scanned(aerial, k);
            }
        }
        if cfg.strategy != Strategy::UavOnly {
            sim.scan(Layer::Ugv, &ground_cfg)?;
            g.mark_scanned(ground, 0);
        }
        let series = vec![SeriesPoint { t_total: 0.0, t_exploration: 0.0, coverage: sim.coverage() }];
        Ok(Self {
            cfg,
            sim,
            g,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            ground,
            aerial: Some(aerial),
            home: aerial,
            t_exp: 0.0,
            t_total: 0.0,
            log_tours: Vec::new(),
            series,
            idle_streak: 0,
            clock: None,
        })
    }

    fn begin_planning(&mut self) {
        crate::work::take();
        self.clock = Some(Instant::now());
    }

    /// Returns `(compute_ms, measured_ms)` of the planning phase.
    fn end_planning(&mut self) -> (f64, f64) {
        let units = crate::work::take() as f64;
        let measured = self.clock.take().map_or(0.0, |c| c.elapsed().as_secs_f64() * 1e3);
        let modeled = units * self.cfg.ns_per_work_unit * 1e-6;
        log::trace!("planning: {units} work units, {measured:.3} ms wall");
        // Wall time is reported only when it drives the clock; logs stay reproducible otherwise.
        match self.cfg.compute_clock {
            ComputeClock::WorkUnits => (modeled, 0.0),
            ComputeClock::Measured => (measured, measured),
        }
    }

    fn expand(&mut self, with_ground: bool) {
        let cfg_uav = match self.aerial {
            Some(a) => self.g.node(a).config,
            None => {
                let p = self.g.node(self.ground).config.position;
                Config::aerial(p.x, p.y, self.cfg.takeoff_altitude, 0.0)
            }
        };
        let cfg_ugv = self.g.node(self.ground).config;
        expand_layers(
            &mut self.g,
            self.sim.map(),
            self.sim.world(),
            &cfg_uav,
            with_ground.then_some(&cfg_ugv),
            &self.cfg.sampling,
            &self.cfg.bodies,
            &mut self.rng,
        );
    }

    fn budgets(&self) -> Budgets {
        Budgets { uav: self.cfg.uav_budget(), ugv: self.cfg.ugv_budget() }
    }

    /// Aerial rendezvous partner of a ground node, created at the highest free altitude up to
    /// the takeoff altitude when missing.
    fn aerial_partner(&mut self, ground: NodeId) -> Option<NodeId> {
        if let Some(a) = self.g.node(ground).rendezvous {
            return Some(a);
        }
        let p = self.g.node(ground).config;
        let b = self.cfg.bodies;
        let step = self.sim.map().resolution();
        let mut alt = self.cfg.takeoff_altitude;
        while alt >= b.altitude_min - 1e-9 {
            let up = Config::aerial(p.position.x, p.position.y, alt, 0.0);
            if is_config_free(self.sim.map(), &up, &b) && validate_rendezvous_edge(self.sim.map(), &up, &p) {
                let id = self.g.insert_anchor(up, self.sim.map(), &b, self.cfg.sampling.d_max);
                match self.g.node(id).rendezvous {
                    None => {
                        self.g.link_rendezvous(id, ground).ok()?;
                        return Some(id);
                    }
                    Some(other) if other == ground => return Some(id),
                    Some(_) => {}
                }
            }
            alt -= step;
        }
        None
    }

    fn record(&mut self, plan_fallback: bool, ex: &Execution, timing: Timing, times: (f64, f64), paths: (Option<&Tour>, &Tour), collect: Option<(NodeId, NodeId)>) -> bool {
        let (compute, measured) = times;
        let flew = ex.uav_length > 0.0;
        let idle = !flew && ex.ugv_length == 0.0 && ex.newly_uav + ex.newly_ugv == 0;
        let scanned_reward = |t: &Tour, skip: usize| t.nodes.iter().skip(skip).fold(0.0, |acc, &v| acc + self.g.node(v).reward as f64);
        let planned_gain = paths.0.map_or(0.0, |t| scanned_reward(t, 0)) + scanned_reward(paths.1, 1);
        let base_total = self.t_total + compute * 1e-3;
        for e in ex.events.iter().filter(|e| e.newly > 0) {
            self.series.push(SeriesPoint { t_total: base_total + e.t, t_exploration: self.t_exp + e.t, coverage: e.coverage });
        }
        let dur = ex.duration(timing);
        self.t_exp += dur;
        self.t_total = base_total + dur + if flew { self.cfg.tau_c } else { 0.0 };
        if let Some(t) = paths.0 {
            self.mark_visited(t, 0);
        }
        self.mark_visited(paths.1, 1);
        let rec = TourRecord {
            tour: self.log_tours.len() + 1,
            uav_length: ex.uav_length,
            tau_a: ex.tau_a,
            ugv_length: ex.ugv_length,
            tau_g: ex.tau_g,
            fallback: plan_fallback,
            idle,
            planned_gain,
            compute_ms: compute,
            measured_ms: measured,
            coverage: self.sim.coverage(),
            t_exploration_cum: self.t_exp,
            t_total_cum: self.t_total,
            newly_uav: ex.newly_uav,
            newly_ugv: ex.newly_ugv,
            uav_path: paths.0.map(|t| t.nodes.clone()).unwrap_or_default(),
            ugv_path: paths.1.nodes.clone(),
            collect,
        };
        log::debug!(
            "{} tour {}: coverage {:.4}, tau_a {:.2}, tau_g {:.2}, fallback {}",
            self.cfg.strategy, rec.tour, rec.coverage, rec.tau_a, rec.tau_g, rec.fallback
        );
        self.log_tours.push(rec);
        idle
    }

    /// Records the heading each scanned node of a path was scanned at.
    fn mark_visited(&mut self, t: &Tour, skip: usize) {
        for &v in t.nodes.iter().skip(skip) {
            let cfg = self.g.node(v).config;
            let heading = match cfg.layer {
                Layer::Ugv => Some(0),
                Layer::Uav => self.g.node(v).best_yaw.and_then(|y| heading_index(&self.cfg.sensor_uav, y)),
            };
            if let Some(k) = heading {
                self.g.mark_scanned(v, k);
            }
        }
    }

    fn tour_proposed(&mut self) -> Result<bool> {
        self.begin_planning();
        self.expand(true);
        refresh_rewards(&mut self.g, self.sim.map(), Layer::Ugv, &self.cfg.sensor_ugv)?;
        let plan = match self.aerial {
            Some(aerial) => {
                let cands = candidate_set(&mut self.g, self.sim.map(), &self.cfg.sensor_uav, self.cfg.cand_cap)?;
                let release = RendezvousPair { ground: self.ground, aerial, utility: 0.0 };
                plan_tour_pair(&self.g, &release, &cands, self.budgets(), self.cfg.lambda, &mut self.rng)?
            }
            None => {
                refresh_rewards(&mut self.g, self.sim.map(), Layer::Uav, &self.cfg.sensor_uav)?;
                let sp = self.g.paths_from(Layer::Ugv, self.ground)?;
                fallback_plan(&self.g, self.ground, None, &sp)?
            }
        };
        let times = self.end_planning();
        let ex = self.sim.execute_paths(&self.g, &plan, Timing::Concurrent)?;
        let collect = plan.collect.filter(|_| !plan.fallback).map(|c| (c.aerial, c.ground));
        let idle = self.record(plan.fallback, &ex, Timing::Concurrent, times, (plan.sigma_uav.as_ref(), &plan.sigma_ugv), collect);
        self.handoff(&plan);
        Ok(idle)
    }

    /// Collect pair of this tour becomes the next release pair.
    fn handoff(&mut self, plan: &TourPlan) {
        match (plan.fallback, plan.collect) {
            (false, Some(c)) => {
                self.ground = c.ground;
                self.aerial = Some(c.aerial);
            }
            _ => {
                self.ground = *plan.sigma_ugv.nodes.last().expect("non-empty ground path");
                self.aerial = self.aerial_partner(self.ground);
            }
        }
    }

    fn tour_uav_only(&mut self) -> Result<bool> {
        self.begin_planning();
        self.aerial = Some(self.home);
        self.expand(false);
        refresh_rewards(&mut self.g, self.sim.map(), Layer::Uav, &self.cfg.sensor_uav)?;
        let inst = layer_instance(&self.g, Layer::Uav, self.home, self.home, self.budgets().uav)?;
        let tour = solve_op(&inst, &mut self.rng)?;
        let times = self.end_planning();
        let ex = self.sim.execute_tours(&self.g, Some(&tour), None, Timing::Concurrent)?;
        let still = Tour { nodes: vec![self.ground], total_length: 0.0, total_reward: 0.0 };
        let zero = tour.total_reward == 0.0;
        let idle = self.record(false, &ex, Timing::Concurrent, times, (Some(&tour), &still), None);
        Ok(idle || zero)
    }

    fn tour_terra(&mut self) -> Result<bool> {
        self.begin_planning();
        self.expand(true);
        refresh_rewards(&mut self.g, self.sim.map(), Layer::Ugv, &self.cfg.sensor_ugv)?;
        let cands = candidate_set(&mut self.g, self.sim.map(), &self.cfg.sensor_uav, self.cfg.cand_cap)?;
        let sp = self.g.paths_from(Layer::Ugv, self.ground)?;
        // Next release: utility with lambda = 0, i.e. the aerial gain; ties on smaller
        // ground distance, then lower id.
        let mut best: Option<(u64, f64, NodeId, NodeId)> = None;
        for &c in &cands {
            let Some(gid) = self.g.node(c).rendezvous else { continue };
            if !sp.reachable(gid) {
                continue;
            }
            let (gain, d) = (self.g.node(c).reward, sp.dist(gid));
            let better = match best {
                None => true,
                Some((bg, bd, bc, _)) => gain > bg || (gain == bg && (d < bd || (d == bd && c < bc))),
            };
            if better {
                best = Some((gain, d, c, gid));
            }
        }
        let Some((_, dist, aerial, gid)) = best else {
            refresh_rewards(&mut self.g, self.sim.map(), Layer::Uav, &self.cfg.sensor_uav)?;
            let plan = fallback_plan(&self.g, self.ground, self.aerial, &sp)?;
            let times = self.end_planning();
            let ex = self.sim.execute_paths(&self.g, &plan, Timing::Sequential)?;
            let idle = self.record(true, &ex, Timing::Sequential, times, (None, &plan.sigma_ugv), None);
            self.handoff(&plan);
            return Ok(idle);
        };
        let drive_nodes = sp.path_to(gid).expect("reachable");
        let drive = Tour {
            total_reward: drive_nodes.iter().fold(0.0, |acc, &v| acc + self.g.node(v).reward as f64),
            nodes: drive_nodes,
            total_length: dist,
        };
        let (c1, m1) = self.end_planning();
        // Drive first, sensing; the UAV plans its loop once the UGV has parked.
        let drive_ex = self.sim.execute_tours(&self.g, None, Some(&drive), Timing::Sequential)?;
        self.begin_planning();
        refresh_rewards(&mut self.g, self.sim.map(), Layer::Uav, &self.cfg.sensor_uav)?;
        let inst = layer_instance(&self.g, Layer::Uav, aerial, aerial, self.budgets().uav)?;
        let flight = solve_op(&inst, &mut self.rng)?;
        let (c2, m2) = self.end_planning();
        let fly_ex = self.sim.execute_tours(&self.g, Some(&flight), None, Timing::Sequential)?;
        let mut events = drive_ex.events.clone();
        events.extend(fly_ex.events.iter().map(|&e| ScanEvent { t: e.t + drive_ex.tau_g, ..e }));
        let ex = Execution {
            tau_a: fly_ex.tau_a,
            tau_g: drive_ex.tau_g,
            uav_length: fly_ex.uav_length,
            ugv_length: drive_ex.ugv_length,
            newly_uav: fly_ex.newly_uav,
            newly_ugv: drive_ex.newly_ugv,
            events,
        };
        let idle = self.record(false, &ex, Timing::Sequential, (c1 + c2, m1 + m2), (Some(&flight), &drive), Some((aerial, gid)));
        self.ground = gid;
        self.aerial = Some(aerial);
        Ok(idle || (flight.total_reward == 0.0 && drive_ex.newly_ugv == 0))
    }

    fn finish(self, stop: StopReason) -> MissionOutcome {
        let first = |thr: f64| self.series.iter().find(|p| p.coverage >= thr).map(|p| p.t_exploration);
        let log = MissionLog {
            strategy: self.cfg.strategy,
            seed: self.cfg.seed,
            t80: first(0.80),
            t95: first(0.95),
            final_coverage: self.sim.coverage(),
            n_tours: self.log_tours.iter().filter(|t| !t.idle).count(),
            stop_reason: stop,
            attribution: self.sim.attribution(),
            regions: self.sim.region_attribution(),
            tours: self.log_tours,
            series: self.series,
        };
        MissionOutcome { map: self.sim.into_map(), log, roadmap: self.g }
    }
}

/// Index of `yaw` in the sensor's yaw set; omnidirectional sensors use index 0.
fn heading_index(sensor: &SensorModel, yaw: f64) -> Option<usize> {
    if !sensor.is_directional() {
        return Some(0);
    }
    sensor.yaw_set.iter().position(|&y| (y - yaw).abs() < 1e-9)
}
