use super::{Grid, SensorModel};
use crate::geometry::Vec3;

/// Exact ordered voxel visitation along the segment `origin -> target`.
///
/// Yields signed cell coordinates, starting with the cell containing `origin` and ending
/// with the cell containing `target`. Every step changes exactly one coordinate by one, so
/// the walk has `|di| + |dj| + |dk|` steps.
pub struct VoxelRay {
    cell: [i64; 3],
    target: [i64; 3],
    step: [i64; 3],
    t_max: [f64; 3],
    t_delta: [f64; 3],
    started: bool,
}

impl VoxelRay {
    pub fn new(grid: &Grid, origin: Vec3, target: Vec3) -> Self {
        let r = grid.resolution;
        let cell = grid.cell_of(origin);
        let target_cell = grid.cell_of(target);
        let o = [origin.x, origin.y, origin.z];
        let d = [target.x - origin.x, target.y - origin.y, target.z - origin.z];
        let mut step = [0; 3];
        let mut t_max = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        for a in 0..3 {
            if d[a] > 0.0 {
                step[a] = 1;
                t_max[a] = ((cell[a] + 1) as f64 * r - o[a]) / d[a];
                t_delta[a] = r / d[a];
            } else if d[a] < 0.0 {
                step[a] = -1;
                t_max[a] = (cell[a] as f64 * r - o[a]) / d[a];
                t_delta[a] = -r / d[a];
            }
        }
        Self {
            cell,
            target: target_cell,
            step,
            t_max,
            t_delta,
            started: false,
        }
    }
}

impl Iterator for VoxelRay {
    type Item = [i64; 3];

    fn next(&mut self) -> Option<[i64; 3]> {
        if !self.started {
            self.started = true;
            return Some(self.cell);
        }
        if self.cell == self.target {
            return None;
        }
        // Only axes that still differ from the target are eligible, which pins the walk
        // to the target cell even under rounding.
        let mut axis = usize::MAX;
        for a in 0..3 {
            if self.cell[a] != self.target[a]
                && (axis == usize::MAX || self.t_max[a] < self.t_max[axis])
            {
                axis = a;
            }
        }
        let dir = (self.target[axis] - self.cell[axis]).signum();
        self.cell[axis] += dir;
        if dir == self.step[axis] {
            self.t_max[axis] += self.t_delta[axis];
        }
        Some(self.cell)
    }
}

/// Voxels whose centers fall inside the sensor frustum placed at `origin` with heading `yaw`.
pub fn frustum_voxels(grid: &Grid, origin: Vec3, yaw: f64, sensor: &SensorModel) -> Vec<usize> {
    let mut out = Vec::new();
    for_each_frustum_voxel(grid, origin, yaw, sensor, |idx, _| out.push(idx));
    out
}

pub(crate) fn for_each_frustum_voxel(
    grid: &Grid,
    origin: Vec3,
    yaw: f64,
    sensor: &SensorModel,
    mut f: impl FnMut(usize, Vec3),
) {
    let range = sensor.range;
    let dims = grid.dims;
    let z_reach = range * sensor.half_vertical().sin().max(0.0) + grid.resolution;
    let z_reach = z_reach.min(range);
    let (Some((i0, i1)), Some((j0, j1)), Some((k0, k1))) = (
        grid.axis_range(origin.x - range, origin.x + range, dims.nx),
        grid.axis_range(origin.y - range, origin.y + range, dims.ny),
        grid.axis_range(origin.z - z_reach, origin.z + z_reach, dims.nz),
    ) else {
        return;
    };
    let probe = sensor.probe(yaw);
    for k in k0..=k1 {
        for j in j0..=j1 {
            for i in i0..=i1 {
                let c = grid.center_of(i, j, k);
                if probe.contains(c - origin) {
                    f(dims.index(i, j, k), c);
                }
            }
        }
    }
}
