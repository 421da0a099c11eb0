//! Mission simulation: the coupled tour loop, and the UAV-only and sequential baselines.

mod export;
mod run;
mod sim;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_map::SensorModel;
use crate::roadmap::{BodyModel, NodeId, SamplingParams};

pub use export::{load_log_csv, write_log_csv, LogRow, Summary};
pub use run::{run, run_mission, run_terra_seq, run_uav_only, run_with_map, MissionOutcome};
pub use sim::{Execution, Mapper, ScanEvent, Simulation, Timing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Proposed,
    UavOnly,
    TerraSeq,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Proposed, Strategy::UavOnly, Strategy::TerraSeq];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Proposed => "proposed",
            Strategy::UavOnly => "uav_only",
            Strategy::TerraSeq => "terra_seq",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy `{s}` (expected proposed, uav_only or terra_seq)")))
    }
}

/// Source of the per-tour planning time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputeClock {
    /// Counted planning work (ray steps, collision cells, graph relaxations) times a fixed
    /// cost per unit. Reproducible.
    WorkUnits,
    /// Measured wall time of the planning phase.
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MissionConfig {
    /// Seconds.
    pub tau_a_max: f64,
    pub v_uav: f64,
    pub v_ugv: f64,
    /// Charging dwell after each flight, seconds.
    pub tau_c: f64,
    pub lambda: f64,
    #[serde(flatten)]
    pub sampling: SamplingParams,
    pub bodies: BodyModel,
    pub sensor_uav: SensorModel,
    pub sensor_ugv: SensorModel,
    pub coverage_target: f64,
    /// Simulated seconds of total mission time.
    pub wall_time_cap: f64,
    pub strategy: Strategy,
    pub seed: u64,
    /// Shared start `(x, y)` of both robots, meters.
    pub start: [f64; 2],
    pub takeoff_altitude: f64,
    /// Radius of the upright cylinder around the start, from the ground to
    /// `takeoff_altitude + prior_radius`, that is mapped before the first scan.
    pub prior_radius: f64,
    pub cand_cap: usize,
    /// Distance between scans along traversed edges, meters.
    pub scan_spacing: f64,
    /// Fixed takeoff plus landing allowance deducted from the UAV distance budget, meters.
    pub takeoff_landing_cost: f64,
    pub compute_clock: ComputeClock,
    pub ns_per_work_unit: f64,
    pub max_tours: usize,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            tau_a_max: 60.0,
            v_uav: 0.5,
            v_ugv: 0.34,
            tau_c: 5.0,
            lambda: 0.001,
            sampling: SamplingParams::default(),
            bodies: BodyModel::default(),
            sensor_uav: SensorModel::directional(2.0, 90.0, 90.0, 8),
            sensor_ugv: SensorModel::omnidirectional(5.0, 30.0, 0.3),
            coverage_target: 0.95,
            wall_time_cap: 1800.0,
            strategy: Strategy::Proposed,
            seed: 0,
            start: [1.0, 1.0],
            takeoff_altitude: 1.0,
            prior_radius: 1.0,
            cand_cap: crate::coordination::DEFAULT_CAND_CAP,
            scan_spacing: 1.0,
            takeoff_landing_cost: 0.0,
            compute_clock: ComputeClock::WorkUnits,
            ns_per_work_unit: 4.0,
            max_tours: 400,
        }
    }
}

impl MissionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.v_uav > 0.0 && self.v_ugv > 0.0) {
            return bad("speeds must be positive");
        }
        if !(self.tau_a_max > 0.0) || !(self.tau_c >= 0.0) || !(self.lambda >= 0.0) {
            return bad("tau_a_max must be positive; tau_c and lambda non-negative");
        }
        if !(self.coverage_target > 0.0 && self.coverage_target <= 1.0) {
            return bad("coverage_target must lie in (0, 1]");
        }
        if !(self.prior_radius >= 0.0) {
            return bad("prior_radius must be non-negative");
        }
        if !(self.scan_spacing > 0.0) || !(self.takeoff_landing_cost >= 0.0) {
            return bad("scan_spacing must be positive and takeoff_landing_cost non-negative");
        }
        self.sampling.validate()?;
        self.sensor_uav.validate()?;
        self.sensor_ugv.validate()
    }

    /// UAV-OP distance budget `B` with `(B + takeoff_landing_cost) / v_uav <= tau_a_max` exact
    /// in floating point.
    pub fn uav_budget(&self) -> f64 {
        let c = self.takeoff_landing_cost;
        let mut b = crate::geometry::distance_budget(self.tau_a_max, self.v_uav) - c;
        while b > 0.0 && (b + c) / self.v_uav > self.tau_a_max {
            b = f64::from_bits(b.to_bits() - 1);
        }
        b.max(0.0)
    }

    pub fn ugv_budget(&self) -> f64 {
        crate::geometry::distance_budget(self.tau_a_max, self.v_ugv)
    }

    /// Flight time of a UAV tour of `length` meters, allowance included.
    pub fn flight_time(&self, length: f64) -> f64 {
        if length == 0.0 {
            0.0
        } else {
            (length + self.takeoff_landing_cost) / self.v_uav
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    CoverageReached,
    TimeCap,
    Stagnation,
    TourCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourRecord {
    pub tour: usize,
    pub uav_length: f64,
    pub tau_a: f64,
    pub ugv_length: f64,
    pub tau_g: f64,
    pub fallback: bool,
    /// Neither robot moved.
    pub idle: bool,
    /// Stored reward summed over the nodes scanned on arrival (every path node but the first).
    pub planned_gain: f64,
    pub compute_ms: f64,
    pub measured_ms: f64,
    pub coverage: f64,
    pub t_exploration_cum: f64,
    pub t_total_cum: f64,
    pub newly_uav: usize,
    pub newly_ugv: usize,
    pub uav_path: Vec<NodeId>,
    pub ugv_path: Vec<NodeId>,
    /// Aerial and ground node of the collect pair for coupled tours.
    pub collect: Option<(NodeId, NodeId)>,
}

/// One coverage sample; times are cumulative mission times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t_total: f64,
    pub t_exploration: f64,
    pub coverage: f64,
}

/// Newly mapped voxel counts by first mapper.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub prior: usize,
    pub uav: usize,
    pub ugv: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionAttribution {
    pub name: String,
    pub voxels: usize,
    pub counts: Attribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionLog {
    pub strategy: Strategy,
    pub seed: u64,
    pub tours: Vec<TourRecord>,
    pub series: Vec<SeriesPoint>,
    pub t80: Option<f64>,
    pub t95: Option<f64>,
    pub final_coverage: f64,
    pub n_tours: usize,
    pub stop_reason: StopReason,
    pub attribution: Attribution,
    pub regions: Vec<RegionAttribution>,
}

impl MissionLog {
    pub fn summary(&self) -> Summary {
        Summary::from_log(self)
    }
}
