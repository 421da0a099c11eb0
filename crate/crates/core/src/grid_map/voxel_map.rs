use serde::{Deserialize, Serialize};

use super::raycast::{for_each_frustum_voxel, VoxelRay};
use super::sensor::YawGain;
use super::{Config, Dims, Grid, SensorModel, WorldModel};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::work;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Occupancy {
    Unknown = 0,
    Free = 1,
    Occupied = 2,
}

/// Occupancy knowledge built from noise-free scans of a [`WorldModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelMap {
    dims: Dims,
    resolution: f64,
    cells: Vec<Occupancy>,
    known: usize,
}

impl VoxelMap {
    pub fn unknown(dims: Dims, resolution: f64) -> Self {
        Self {
            dims,
            resolution,
            cells: vec![Occupancy::Unknown; dims.len()],
            known: 0,
        }
    }

    pub fn for_world(world: &WorldModel) -> Self {
        Self::unknown(world.dims(), world.resolution())
    }

    /// Map that already knows every voxel's truth label.
    pub fn fully_mapped(world: &WorldModel) -> Self {
        let cells = world
            .occupied()
            .iter()
            .map(|&o| if o { Occupancy::Occupied } else { Occupancy::Free })
            .collect::<Vec<_>>();
        Self::from_cells(world.dims(), world.resolution(), cells)
    }

    pub fn from_cells(dims: Dims, resolution: f64, cells: Vec<Occupancy>) -> Self {
        assert_eq!(cells.len(), dims.len());
        let known = cells.iter().filter(|&&c| c != Occupancy::Unknown).count();
        Self {
            dims,
            resolution,
            cells,
            known,
        }
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.dims, self.resolution)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells(&self) -> &[Occupancy] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, idx: usize) -> Occupancy {
        self.cells[idx]
    }

    pub fn at(&self, p: Vec3) -> Option<Occupancy> {
        self.grid().voxel_of(p).map(|i| self.cells[i])
    }

    /// Sets a voxel label directly; used when building fixtures and loading snapshots.
    pub fn set(&mut self, idx: usize, label: Occupancy) {
        let was_known = self.cells[idx] != Occupancy::Unknown;
        let is_known = label != Occupancy::Unknown;
        self.known = self.known + is_known as usize - was_known as usize;
        self.cells[idx] = label;
    }

    pub fn known_count(&self) -> usize {
        self.known
    }

    pub fn unknown_count(&self) -> usize {
        self.cells.len() - self.known
    }

    fn sensor_origin(&self, position: Vec3, sensor: &SensorModel) -> Result<Vec3> {
        let o = sensor.origin(position);
        if self.grid().contains(o) {
            Ok(o)
        } else {
            Err(Error::InvalidConfig {
                x: o.x,
                y: o.y,
                z: o.z,
            })
        }
    }

    /// Simulates one scan. Records every frustum voxel whose line of sight is clear in the
    /// world, plus the in-frustum occupied voxel that stops the ray to an unknown target the
    /// current map still deems visible. Returns the number of voxels that left `Unknown`;
    /// never more than the prior [`info_gain`](Self::info_gain).
    pub fn integrate_scan(
        &mut self,
        world: &WorldModel,
        cfg: &Config,
        sensor: &SensorModel,
    ) -> Result<usize> {
        self.integrate_scan_with(world, cfg, sensor, |_| {})
    }

    /// As [`integrate_scan`](Self::integrate_scan), reporting each newly mapped voxel.
    pub fn integrate_scan_with(
        &mut self,
        world: &WorldModel,
        cfg: &Config,
        sensor: &SensorModel,
        mut on_new: impl FnMut(usize),
    ) -> Result<usize> {
        assert_eq!(self.dims, world.dims(), "map and world shapes differ");
        let origin = self.sensor_origin(cfg.position, sensor)?;
        let grid = self.grid();
        let mut fresh = Vec::new();
        let mut steps = 0u64;
        let probe = sensor.probe(cfg.yaw);
        for_each_frustum_voxel(&grid, origin, cfg.yaw, sensor, |idx, center| {
            if self.cells[idx] != Occupancy::Unknown {
                return;
            }
            let (hit, n) = first_blocker(&grid, origin, center, |i| world.is_occupied(i));
            steps += n;
            let Some(h) = hit else {
                fresh.push(idx);
                return;
            };
            // The ray terminates on `h`. Recording it is sound only if this target counts
            // toward the current gain, so every hit is charged to a distinct counted target.
            if self.cells[h] == Occupancy::Unknown && probe.contains(grid.center(h) - origin) {
                let (clear, n) = line_of_sight(&grid, origin, center, |i| self.cells[i] == Occupancy::Occupied);
                steps += n;
                if clear {
                    fresh.push(h);
                }
            }
        });
        work::add(steps);
        fresh.sort_unstable();
        fresh.dedup();
        for &idx in &fresh {
            let label = if world.is_occupied(idx) {
                Occupancy::Occupied
            } else {
                Occupancy::Free
            };
            self.cells[idx] = label;
            on_new(idx);
        }
        self.known += fresh.len();
        Ok(fresh.len())
    }

    /// Unknown voxels in the frustum whose line of sight crosses no known-occupied voxel.
    /// Unknown voxels are treated as transparent.
    pub fn info_gain(&self, cfg: &Config, sensor: &SensorModel) -> Result<u64> {
        let origin = self.sensor_origin(cfg.position, sensor)?;
        let grid = self.grid();
        let mut gain = 0;
        let mut steps = 0u64;
        for_each_frustum_voxel(&grid, origin, cfg.yaw, sensor, |idx, center| {
            if self.cells[idx] == Occupancy::Unknown {
                let (visible, n) = line_of_sight(&grid, origin, center, |i| {
                    self.cells[i] == Occupancy::Occupied
                });
                steps += n;
                gain += visible as u64;
            }
        });
        work::add(steps);
        Ok(gain)
    }

    /// Gain of every heading in the sensor's yaw set, in yaw-set order.
    pub fn yaw_gains(&self, position: Vec3, sensor: &SensorModel) -> Result<Vec<u64>> {
        if !sensor.is_directional() {
            return Err(Error::NotDirectional);
        }
        let origin = self.sensor_origin(position, sensor)?;
        let grid = self.grid();
        // Line of sight does not depend on heading: cast once over the widest frustum and
        // bin each visible unknown voxel into the headings that contain it.
        let mut wide = sensor.clone();
        wide.h_fov = 360.0;
        let probes = sensor
            .yaw_set
            .iter()
            .map(|&y| sensor.probe(y))
            .collect::<Vec<_>>();
        let mut gains = vec![0u64; probes.len()];
        let mut steps = 0u64;
        for_each_frustum_voxel(&grid, origin, 0.0, &wide, |idx, center| {
            if self.cells[idx] != Occupancy::Unknown {
                return;
            }
            let d = center - origin;
            if !probes.iter().any(|p| p.contains(d)) {
                return;
            }
            let (visible, n) = line_of_sight(&grid, origin, center, |i| {
                self.cells[i] == Occupancy::Occupied
            });
            steps += n;
            if visible {
                for (g, p) in gains.iter_mut().zip(&probes) {
                    *g += p.contains(d) as u64;
                }
            }
        });
        work::add(steps);
        Ok(gains)
    }

    /// Best heading over the sensor's yaw set; ties go to the lowest index.
    pub fn best_yaw_gain(&self, position: Vec3, sensor: &SensorModel) -> Result<YawGain> {
        let gains = self.yaw_gains(position, sensor)?;
        Ok(best_heading(&gains, sensor, u64::MAX).expect("yaw set is non-empty"))
    }

    /// Gain of a configuration under its sensor: best heading for directional sensors.
    pub fn reward(&self, position: Vec3, sensor: &SensorModel) -> Result<YawGain> {
        if sensor.is_directional() {
            self.best_yaw_gain(position, sensor)
        } else {
            let gain = self.info_gain(&Config::new(position, 0.0, super::Layer::Ugv), sensor)?;
            Ok(YawGain {
                index: 0,
                yaw: 0.0,
                gain,
            })
        }
    }
}

/// Walks the segment from `origin` to the voxel centered at `target`; the target is visible
/// when no voxel strictly between the origin cell and the target cell blocks. Returns the
/// verdict and the number of voxels examined.
#[inline]
fn line_of_sight(
    grid: &Grid,
    origin: Vec3,
    target: Vec3,
    blocks: impl FnMut(usize) -> bool,
) -> (bool, u64) {
    let (hit, steps) = first_blocker(grid, origin, target, blocks);
    (hit.is_none(), steps)
}

/// First voxel strictly between the origin cell and the target cell that blocks, if any.
#[inline]
fn first_blocker(
    grid: &Grid,
    origin: Vec3,
    target: Vec3,
    mut blocks: impl FnMut(usize) -> bool,
) -> (Option<usize>, u64) {
    let mut ray = VoxelRay::new(grid, origin, target).peekable();
    ray.next();
    let mut steps = 0;
    while let Some(cell) = ray.next() {
        if ray.peek().is_none() {
            break;
        }
        steps += 1;
        let idx = grid.dims.index(cell[0] as usize, cell[1] as usize, cell[2] as usize);
        if blocks(idx) {
            return (Some(idx), steps);
        }
    }
    (None, steps)
}

/// `|mapped ∩ reachable| / |reachable|`.
pub fn coverage_fraction(map: &VoxelMap, world: &WorldModel) -> Result<f64> {
    if map.dims != world.dims() {
        return Err(Error::ShapeError {
            map: map.dims.as_array(),
            world: world.dims().as_array(),
        });
    }
    let mut mapped = 0usize;
    let mut total = 0usize;
    for (i, &c) in map.cells.iter().enumerate() {
        if world.is_reachable(i) {
            total += 1;
            mapped += (c != Occupancy::Unknown) as usize;
        }
    }
    Ok(if total == 0 {
        1.0
    } else {
        mapped as f64 / total as f64
    })
}


/// Best gain among the headings whose bit is set in `allowed`; ties go to the lowest index.
pub fn best_heading(gains: &[u64], sensor: &SensorModel, allowed: u64) -> Option<YawGain> {
    let mut best: Option<YawGain> = None;
    for (index, &gain) in gains.iter().enumerate() {
        if index < 64 && allowed & (1 << index) == 0 {
            continue;
        }
        if best.is_none_or(|b| gain > b.gain) {
            best = Some(YawGain {
                index,
                yaw: sensor.yaw_set[index],
                gain,
            });
        }
    }
    best
}
