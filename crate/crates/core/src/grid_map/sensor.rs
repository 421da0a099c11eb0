use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MountKind {
    Aerial,
    Ground,
}

/// Idealized range/field-of-view sensor.
///
/// A voxel is inside the frustum when its center lies within `range`, within
/// `h_fov / 2` of the heading in azimuth (skipped for `h_fov = 360`) and within
/// `v_fov / 2` of the horizontal plane in elevation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    /// Meters.
    pub range: f64,
    /// Degrees.
    pub h_fov: f64,
    /// Degrees.
    pub v_fov: f64,
    /// Discretized headings in radians; empty for omnidirectional sensors.
    #[serde(default)]
    pub yaw_set: Vec<f64>,
    pub mount_kind: MountKind,
    /// Height of the sensor above the carrying configuration, meters.
    #[serde(default)]
    pub mount_height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YawGain {
    pub index: usize,
    pub yaw: f64,
    pub gain: u64,
}

impl SensorModel {
    /// Aerial RGB-D style camera with `k` evenly spaced headings.
    pub fn directional(range: f64, h_fov: f64, v_fov: f64, k: usize) -> Self {
        Self {
            range,
            h_fov,
            v_fov,
            yaw_set: (0..k).map(|i| i as f64 * TAU / k as f64).collect(),
            mount_kind: MountKind::Aerial,
            mount_height: 0.0,
        }
    }

    /// Spinning LiDAR style sensor with full azimuth coverage.
    pub fn omnidirectional(range: f64, v_fov: f64, mount_height: f64) -> Self {
        Self {
            range,
            h_fov: 360.0,
            v_fov,
            yaw_set: Vec::new(),
            mount_kind: MountKind::Ground,
            mount_height,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("sensor: {m}")));
        if !(self.range > 0.0) {
            return bad("range must be positive");
        }
        if !(self.h_fov > 0.0 && self.h_fov <= 360.0) {
            return bad("h_fov must lie in (0, 360]");
        }
        if !(self.v_fov > 0.0 && self.v_fov <= 180.0) {
            return bad("v_fov must lie in (0, 180]");
        }
        for (n, &a) in self.yaw_set.iter().enumerate() {
            if !(0.0..TAU).contains(&a) {
                return bad("yaw angles must lie in [0, 2pi)");
            }
            if self.yaw_set[..n].contains(&a) {
                return bad("yaw angles must be distinct");
            }
        }
        Ok(())
    }

    pub fn is_directional(&self) -> bool {
        !self.yaw_set.is_empty()
    }

    pub fn origin(&self, position: Vec3) -> Vec3 {
        position + Vec3::new(0.0, 0.0, self.mount_height)
    }

    pub(crate) fn half_vertical(&self) -> f64 {
        (self.v_fov * 0.5).to_radians()
    }

    pub(crate) fn probe(&self, yaw: f64) -> FrustumProbe {
        let half_h = (self.h_fov * 0.5).to_radians();
        let half_v = self.half_vertical();
        FrustumProbe {
            range2: self.range * self.range,
            azimuth: (self.h_fov < 360.0).then(|| (yaw.cos(), yaw.sin(), half_h.cos())),
            elevation_tan: (self.v_fov < 180.0).then(|| half_v.tan()),
        }
    }
}

/// Voxel centers within this distance of a frustum face count as inside.
pub const BOUNDARY_EPS: f64 = 1e-9;

/// Precomputed frustum membership test relative to the sensor origin.
pub(crate) struct FrustumProbe {
    range2: f64,
    azimuth: Option<(f64, f64, f64)>,
    elevation_tan: Option<f64>,
}

impl FrustumProbe {
    #[inline]
    pub(crate) fn contains(&self, d: Vec3) -> bool {
        if d.dot(d) > self.range2 + BOUNDARY_EPS {
            return false;
        }
        let h = d.x.hypot(d.y);
        if let Some(t) = self.elevation_tan {
            if d.z.abs() > h * t + BOUNDARY_EPS {
                return false;
            }
        }
        if let Some((c, s, cos_half)) = self.azimuth {
            if h > 0.0 && d.x * c + d.y * s < h * cos_half - BOUNDARY_EPS {
                return false;
            }
        }
        true
    }
}
