use serde::{Deserialize, Serialize};

use crate::grid_map::{Config, Layer, Occupancy, VoxelMap, WorldModel};
use crate::Vec3;

const TOUCH_EPS: f64 = 1e-9;

/// Robot bodies for collision checks: a sphere for the UAV, an upright cylinder standing
/// on the ground for the UGV. The altitude band bounds aerial sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BodyModel {
    pub uav_radius: f64,
    pub ugv_radius: f64,
    pub ugv_height: f64,
    pub altitude_min: f64,
    pub altitude_max: f64,
}

impl Default for BodyModel {
    fn default() -> Self {
        Self {
            uav_radius: 0.2,
            ugv_radius: 0.25,
            ugv_height: 0.4,
            altitude_min: 0.5,
            altitude_max: 3.5,
        }
    }
}

/// Calls `f` for every voxel (signed coords) whose box meets the open body; stops at the first `false`.
fn body_voxels(map: &VoxelMap, cfg: &Config, bodies: &BodyModel, mut f: impl FnMut([i64; 3]) -> bool) -> bool {
    let r = map.resolution();
    let p = cfg.position;
    let (rad, z_lo, z_hi) = match cfg.layer {
        Layer::Uav => (bodies.uav_radius, p.z - bodies.uav_radius, p.z + bodies.uav_radius),
        Layer::Ugv => (bodies.ugv_radius, p.z, p.z + bodies.ugv_height),
    };
    let lo = |v: f64| ((v + TOUCH_EPS) / r).floor() as i64;
    let hi = |v: f64| ((v - TOUCH_EPS) / r).floor() as i64;
    let mut checked = 0u64;
    let mut ok = true;
    'outer: for k in lo(z_lo)..=hi(z_hi) {
        for j in lo(p.y - rad)..=hi(p.y + rad) {
            for i in lo(p.x - rad)..=hi(p.x + rad) {
                // Closest point of the voxel box to the body axis / center.
                let cx = p.x.clamp(i as f64 * r, (i + 1) as f64 * r);
                let cy = p.y.clamp(j as f64 * r, (j + 1) as f64 * r);
                let dz = match cfg.layer {
                    Layer::Uav => p.z - p.z.clamp(k as f64 * r, (k + 1) as f64 * r),
                    Layer::Ugv => 0.0,
                };
                let d2 = (p.x - cx).powi(2) + (p.y - cy).powi(2) + dz * dz;
                if d2 >= rad * rad - TOUCH_EPS {
                    continue;
                }
                checked += 1;
                if !f([i, j, k]) {
                    ok = false;
                    break 'outer;
                }
            }
        }
    }
    crate::work::add(checked);
    ok
}

/// True iff every voxel the body overlaps lies in the grid and is mapped free.
pub fn is_config_free(map: &VoxelMap, cfg: &Config, bodies: &BodyModel) -> bool {
    let dims = map.dims();
    body_voxels(map, cfg, bodies, |c| {
        dims.contains_signed(c)
            && map.get(dims.index(c[0] as usize, c[1] as usize, c[2] as usize)) == Occupancy::Free
    })
}

/// Samples the straight motion from `from` to `to` (same layer) at half-voxel spacing.
pub fn segment_free(map: &VoxelMap, from: &Config, to: Vec3, bodies: &BodyModel) -> bool {
    let len = from.position.distance(to);
    let step = 0.5 * map.resolution();
    let n = (len / step).ceil().max(1.0) as usize;
    (0..=n).all(|s| {
        let c = Config::new(from.position.lerp(to, s as f64 / n as f64), from.yaw, from.layer);
        is_config_free(map, &c, bodies)
    })
}

/// Ground pose beneath an aerial pose, if the UGV body fits there in mapped free space.
pub fn project_config(
    cfg_uav: &Config,
    map: &VoxelMap,
    world: &WorldModel,
    bodies: &BodyModel,
) -> Option<Config> {
    let p = cfg_uav.position;
    let e = map.grid().extent();
    if !(p.x >= 0.0 && p.y >= 0.0 && p.x < e.x && p.y < e.y) {
        return None;
    }
    let mut g = Config::ground(p.x, p.y, world.ground_height(p.x, p.y));
    g.yaw = cfg_uav.yaw;
    is_config_free(map, &g, bodies).then_some(g)
}

/// True iff the vertical column between the two poses is mapped free throughout.
pub fn validate_rendezvous_edge(map: &VoxelMap, cfg_uav: &Config, cfg_ugv: &Config) -> bool {
    let (a, b) = (cfg_uav.position, cfg_ugv.position);
    if a.x != b.x || a.y != b.y {
        return false;
    }
    let grid = map.grid();
    let (lo, hi) = if a.z <= b.z { (a, b) } else { (b, a) };
    let c0 = grid.cell_of(lo);
    let c1 = grid.cell_of(hi);
    (c0[2]..=c1[2]).all(|k| {
        let c = [c0[0], c0[1], k];
        grid.dims.contains_signed(c)
            && map.get(grid.dims.index(c[0] as usize, c[1] as usize, k as usize)) == Occupancy::Free
    })
}
