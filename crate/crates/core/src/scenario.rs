//! Scenario bundles: a world document plus the mission knobs, in one TOML file.
//!
//! ```toml
//! name = "room"
//!
//! [world]
//! dims = [60, 60, 20]
//! resolution = 0.2
//!
//! [mission]
//! tau_a_max = 60.0
//! d_min = 1.2
//!
//! [sensor_uav]
//! range = 2.0
//! h_fov = 90.0
//! v_fov = 90.0
//! yaw_count = 8
//! ```
//!
//! Every mission key is optional and falls back to [`MissionConfig::default`]. A sensor
//! block given in the file replaces the default sensor wholesale.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_map::world_file::WorldDoc;
use crate::grid_map::SensorModel;
use crate::grid_map::WorldModel;
use crate::mission::{MissionConfig, Strategy};

/// Sensor block of a scenario file. `h_fov = 360` gives an omnidirectional ground sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub range: f64,
    pub h_fov: f64,
    pub v_fov: f64,
    /// Evenly spaced candidate headings; ignored for omnidirectional sensors.
    #[serde(default = "default_yaw_count")]
    pub yaw_count: usize,
    #[serde(default)]
    pub mount_height: f64,
}

fn default_yaw_count() -> usize {
    8
}

impl SensorSpec {
    pub fn model(&self) -> SensorModel {
        if self.h_fov >= 360.0 {
            SensorModel::omnidirectional(self.range, self.v_fov, self.mount_height)
        } else {
            SensorModel { mount_height: self.mount_height, ..SensorModel::directional(self.range, self.h_fov, self.v_fov, self.yaw_count) }
        }
    }

    pub fn from_model(m: &SensorModel) -> Self {
        Self {
            range: m.range,
            h_fov: m.h_fov,
            v_fov: m.v_fov,
            yaw_count: if m.is_directional() { m.yaw_set.len() } else { default_yaw_count() },
            mount_height: m.mount_height,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ScenarioDoc {
    name: String,
    #[serde(default)]
    description: String,
    world: WorldDoc,
    #[serde(default)]
    mission: toml::Table,
    #[serde(default)]
    sensor_uav: Option<SensorSpec>,
    #[serde(default)]
    sensor_ugv: Option<SensorSpec>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub world_doc: WorldDoc,
    pub world: WorldModel,
    /// Strategy and seed are placeholders; see [`Scenario::config`].
    pub mission: MissionConfig,
}

fn parse_err(message: impl Into<String>) -> Error {
    Error::Parse { what: "scenario".into(), message: message.into() }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_toml_with(text, &[])
    }

    /// Parses `text`, then applies `key=value` overrides in order (see [`apply_override`]).
    pub fn from_toml_with(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut root: toml::Table = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        let defaults = MissionConfig::default();
        for (k, m) in [("sensor_uav", &defaults.sensor_uav), ("sensor_ugv", &defaults.sensor_ugv)] {
            if !root.contains_key(k) {
                root.insert(k.into(), toml::Value::try_from(SensorSpec::from_model(m)).expect("sensor serializes"));
            }
        }
        for (k, v) in overrides {
            apply_override(&mut root, k, v)?;
        }
        let doc: ScenarioDoc = toml::Value::Table(root).try_into().map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
        let mut mission: MissionConfig = toml::Value::Table(doc.mission.clone())
            .try_into()
            .map_err(|e: toml::de::Error| parse_err(format!("[mission]: {e}")))?;
        let known = toml::Table::try_from(&mission).expect("mission config serializes");
        if let Some(k) = doc.mission.keys().find(|k| !known.contains_key(*k)) {
            return Err(parse_err(format!("[mission]: unknown key `{k}`")));
        }
        if let Some(s) = &doc.sensor_uav {
            mission.sensor_uav = s.model();
        }
        if let Some(s) = &doc.sensor_ugv {
            mission.sensor_ugv = s.model();
        }
        mission.validate()?;
        let world = doc.world.build()?;
        Ok(Self { name: doc.name, description: doc.description, world_doc: doc.world, world, mission })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::load_with(path, &[])
    }

    pub fn load_with(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse { what: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml_with(&text, overrides).map_err(|e| match e {
            Error::Parse { what, message } => Error::Parse { what: format!("{} ({what})", path.display()), message },
            other => other,
        })
    }

    pub fn config(&self, strategy: Strategy, seed: u64) -> MissionConfig {
        MissionConfig { strategy, seed, ..self.mission.clone() }
    }

    pub fn to_toml(&self) -> String {
        let mut mission = toml::Table::try_from(&self.mission).expect("mission config serializes");
        for k in ["sensor_uav", "sensor_ugv", "strategy", "seed"] {
            mission.remove(k);
        }
        let doc = ScenarioDoc {
            name: self.name.clone(),
            description: self.description.clone(),
            world: self.world_doc.clone(),
            mission,
            sensor_uav: Some(SensorSpec::from_model(&self.mission.sensor_uav)),
            sensor_ugv: Some(SensorSpec::from_model(&self.mission.sensor_ugv)),
        };
        toml::to_string(&doc).expect("scenario serializes")
    }

    /// Checks everything a run checks before its first tour: parse, world geometry,
    /// parameters, and a collision-free start.
    pub fn validate(&self) -> Result<()> {
        let cfg = &self.mission;
        let [x, y] = cfg.start;
        let grid = self.world.grid();
        let gh = self.world.ground_height(x, y);
        let b = &cfg.bodies;
        let probe = |p: crate::Vec3| grid.voxel_of(p).is_none_or(|i| self.world.is_occupied(i));
        let z_top = cfg.takeoff_altitude + b.uav_radius;
        let mut z = gh + 1e-6;
        while z < z_top {
            if probe(crate::Vec3::new(x, y, z)) {
                return Err(Error::InvalidScenario(format!("start column blocked at z = {z:.2}")));
            }
            z += grid.resolution * 0.5;
        }
        if !(cfg.takeoff_altitude >= b.altitude_min && cfg.takeoff_altitude <= b.altitude_max) {
            return Err(Error::InvalidScenario("takeoff altitude outside the aerial altitude band".into()));
        }
        Ok(())
    }
}

/// Sets `key` to `value` in a scenario document.
///
/// - A dotted key (`sensor_uav.range`, `world.ground_height`) addresses the document directly.
/// - A bare key addresses `[mission]`, except `resolution`, which re-grids the world keeping
///   its metric extent.
///
/// `value` is read as a TOML value; anything that does not parse is taken as a string.
pub fn apply_override(root: &mut toml::Table, key: &str, value: &str) -> Result<()> {
    let bad = |m: String| Error::InvalidParameter(format!("--param {key}: {m}"));
    let parsed: toml::Value = toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    if key == "resolution" {
        let r = parsed.as_float().or(parsed.as_integer().map(|i| i as f64)).filter(|r| *r > 0.0);
        let r = r.ok_or_else(|| bad("expected a positive number".into()))?;
        let world = root.get_mut("world").and_then(|w| w.as_table_mut()).ok_or_else(|| bad("no [world] table".into()))?;
        let old = world.get("resolution").and_then(|v| v.as_float()).ok_or_else(|| bad("world has no resolution".into()))?;
        let dims = world.get("dims").and_then(|v| v.as_array()).ok_or_else(|| bad("world has no dims".into()))?;
        let new_dims: Vec<toml::Value> = dims
            .iter()
            .map(|d| {
                let n = d.as_integer().unwrap_or(0) as f64;
                toml::Value::Integer(((n * old / r).round() as i64).max(1))
            })
            .collect();
        world.insert("dims".into(), toml::Value::Array(new_dims));
        world.insert("resolution".into(), toml::Value::Float(r));
        return Ok(());
    }
    let path: Vec<&str> = if key.contains('.') { key.split('.').collect() } else { vec!["mission", key] };
    let mut table = root;
    for seg in &path[..path.len() - 1] {
        table = table
            .entry(seg.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| bad(format!("`{seg}` is not a table")))?;
    }
    table.insert(path[path.len() - 1].to_string(), parsed);
    Ok(())
}

/// Splits `key=value`.
pub fn parse_param(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got `{s}`")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(Error::InvalidParameter(format!("empty key in `{s}`")));
    }
    Ok((k.to_string(), v.trim().to_string()))
}
