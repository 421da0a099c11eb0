//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use rx_core::grid_map::SensorModel;
use rx_core::{Grid, Vec3};

/// Frustum membership by explicit azimuth/elevation angles.
pub fn in_frustum(d: Vec3, yaw: f64, s: &SensorModel) -> bool {
    let dist = d.norm();
    if dist > s.range + 1e-9 {
        return false;
    }
    if dist < 1e-9 {
        return true;
    }
    let h = d.x.hypot(d.y);
    let elev = d.z.atan2(h).abs();
    if s.v_fov < 180.0 && elev > (s.v_fov / 2.0).to_radians() + 1e-9 {
        return false;
    }
    if s.h_fov < 360.0 && h > 0.0 {
        let mut diff = d.y.atan2(d.x) - yaw;
        while diff > PI {
            diff -= 2.0 * PI;
        }
        while diff < -PI {
            diff += 2.0 * PI;
        }
        if diff.abs() > (s.h_fov / 2.0).to_radians() + 1e-9 {
            return false;
        }
    }
    true
}

/// Brute-force enumeration of every grid voxel whose center is inside the frustum.
pub fn frustum_set(grid: &Grid, origin: Vec3, yaw: f64, s: &SensorModel) -> Vec<usize> {
    (0..grid.dims.len())
        .filter(|&i| in_frustum(grid.center(i) - origin, yaw, s))
        .collect()
}

/// Dense point-sampling line of sight: the target is visible when no sampled point strictly
/// between the origin cell and the target cell lies in a blocking voxel.
pub fn dense_visible(grid: &Grid, origin: Vec3, target: usize, blocks: impl Fn(usize) -> bool) -> bool {
    let c = grid.center(target);
    let start = grid.voxel_of(origin);
    let n = 4000;
    for s in 1..n {
        let p = origin.lerp(c, s as f64 / n as f64);
        if let Some(v) = grid.voxel_of(p) {
            if Some(v) != start && v != target && blocks(v) {
                return false;
            }
        }
    }
    true
}

/// Dense point sampling of the ray to `target`: the first blocking voxel strictly between the
/// origin cell and the target cell.
pub fn dense_first_blocker(grid: &Grid, origin: Vec3, target: usize, blocks: impl Fn(usize) -> bool) -> Option<usize> {
    let c = grid.center(target);
    let start = grid.voxel_of(origin);
    let n = 4000;
    (1..n)
        .filter_map(|s| grid.voxel_of(origin.lerp(c, s as f64 / n as f64)))
        .find(|&v| Some(v) != start && v != target && blocks(v))
}

/// Exhaustive simple-path enumeration on an undirected weighted graph.
/// Returns `(length, path)` of the best path under (length, lexicographic) order.
pub fn best_simple_path(
    adj: &[Vec<(usize, f64)>],
    from: usize,
    to: usize,
) -> Option<(f64, Vec<usize>)> {
    fn dfs(
        adj: &[Vec<(usize, f64)>],
        to: usize,
        path: &mut Vec<usize>,
        len: f64,
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        let u = *path.last().unwrap();
        if u == to {
            let better = match best {
                None => true,
                Some((bl, bp)) => len < *bl || (len == *bl && path < bp),
            };
            if better {
                *best = Some((len, path.clone()));
            }
            return;
        }
        for &(v, w) in &adj[u] {
            if !path.contains(&v) {
                path.push(v);
                dfs(adj, to, path, len + w, best);
                path.pop();
            }
        }
    }
    let mut best = None;
    dfs(adj, to, &mut vec![from], 0.0, &mut best);
    best
}

/// Unknown frustum voxels whose sight line avoids known-occupied voxels.
pub fn gain_oracle(map: &rx_core::VoxelMap, position: Vec3, yaw: f64, s: &SensorModel) -> u64 {
    use rx_core::Occupancy;
    let grid = map.grid();
    let origin = s.origin(position);
    frustum_set(&grid, origin, yaw, s)
        .into_iter()
        .filter(|&v| map.get(v) == Occupancy::Unknown)
        .filter(|&v| dense_visible(&grid, origin, v, |b| map.get(b) == Occupancy::Occupied))
        .count() as u64
}

/// Best gain over the sensor's yaw set.
pub fn best_gain_oracle(map: &rx_core::VoxelMap, position: Vec3, s: &SensorModel) -> u64 {
    s.yaw_set.iter().map(|&y| gain_oracle(map, position, y, s)).max().unwrap_or(0)
}
