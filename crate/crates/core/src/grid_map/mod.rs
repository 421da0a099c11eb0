//! Voxel world, occupancy map, simulated sensing and information gain.
//!
//! Voxel `(i, j, k)` covers `[i r, (i+1) r) x [j r, (j+1) r) x [k r, (k+1) r)` in meters,
//! with the grid origin at `(0, 0, 0)`. Linear indices run x-fastest.

mod raycast;
mod sensor;
mod voxel_map;
mod world;
pub mod world_file;

use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;

pub use raycast::{frustum_voxels, VoxelRay};
pub use sensor::{MountKind, SensorModel, YawGain};
pub use voxel_map::{best_heading, coverage_fraction, Occupancy, VoxelMap};
pub use world::{NamedRegion, WorldModel};

/// Voxel counts per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub const fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Self { nx, ny, nz }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.nx;
        let j = (idx / self.nx) % self.ny;
        let k = idx / (self.nx * self.ny);
        [i, j, k]
    }

    pub fn contains_signed(&self, c: [i64; 3]) -> bool {
        c[0] >= 0
            && c[1] >= 0
            && c[2] >= 0
            && (c[0] as usize) < self.nx
            && (c[1] as usize) < self.ny
            && (c[2] as usize) < self.nz
    }
}

/// Shared geometry of a world and the maps built over it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dims: Dims,
    pub resolution: f64,
}

impl Grid {
    pub fn new(dims: Dims, resolution: f64) -> Self {
        Self { dims, resolution }
    }

    pub fn extent(&self) -> Vec3 {
        Vec3::new(
            self.dims.nx as f64 * self.resolution,
            self.dims.ny as f64 * self.resolution,
            self.dims.nz as f64 * self.resolution,
        )
    }

    pub fn contains(&self, p: Vec3) -> bool {
        let e = self.extent();
        p.x >= 0.0 && p.y >= 0.0 && p.z >= 0.0 && p.x < e.x && p.y < e.y && p.z < e.z
    }

    /// Signed voxel coordinates of a point; may lie outside the grid.
    #[inline]
    pub fn cell_of(&self, p: Vec3) -> [i64; 3] {
        [
            (p.x / self.resolution).floor() as i64,
            (p.y / self.resolution).floor() as i64,
            (p.z / self.resolution).floor() as i64,
        ]
    }

    pub fn voxel_of(&self, p: Vec3) -> Option<usize> {
        let c = self.cell_of(p);
        self.dims
            .contains_signed(c)
            .then(|| self.dims.index(c[0] as usize, c[1] as usize, c[2] as usize))
    }

    #[inline]
    pub fn center(&self, idx: usize) -> Vec3 {
        let [i, j, k] = self.dims.coords(idx);
        self.center_of(i, j, k)
    }

    #[inline]
    pub fn center_of(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let r = self.resolution;
        Vec3::new((i as f64 + 0.5) * r, (j as f64 + 0.5) * r, (k as f64 + 0.5) * r)
    }

    /// Inclusive voxel index range along one axis covering `[lo, hi]` meters, clipped to the grid.
    pub fn axis_range(&self, lo: f64, hi: f64, n: usize) -> Option<(usize, usize)> {
        let a = (lo / self.resolution).floor().max(0.0);
        let b = (hi / self.resolution).floor().min(n as f64 - 1.0);
        if b < a || n == 0 {
            None
        } else {
            Some((a as usize, b as usize))
        }
    }
}

/// Roadmap layer a configuration belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Uav,
    Ugv,
}

impl std::fmt::Display for Layer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Layer::Uav => "uav",
            Layer::Ugv => "ugv",
        })
    }
}

/// Robot pose: position in meters plus yaw in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub position: Vec3,
    pub yaw: f64,
    pub layer: Layer,
}

impl Config {
    pub fn new(position: Vec3, yaw: f64, layer: Layer) -> Self {
        Self { position, yaw, layer }
    }

    pub fn aerial(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Self::new(Vec3::new(x, y, z), yaw, Layer::Uav)
    }

    pub fn ground(x: f64, y: f64, ground_height: f64) -> Self {
        Self::new(Vec3::new(x, y, ground_height), 0.0, Layer::Ugv)
    }
}
