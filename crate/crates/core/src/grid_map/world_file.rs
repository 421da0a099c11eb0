//! Structured-text world documents and map snapshots.
//!
//! A world is a grid (`dims`, `resolution`) plus occupied content given as primitive solids
//! applied in order and/or run-length encoded linear index runs. Map snapshots reuse the
//! same document with an additional `unknown_runs` list.

use serde::{Deserialize, Serialize};

use super::{Dims, Grid, NamedRegion, Occupancy, VoxelMap, WorldModel};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fill {
    #[default]
    Occupied,
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Solid {
    /// Voxels whose centers lie in `[min, max)`.
    Box {
        min: [f64; 3],
        max: [f64; 3],
        #[serde(default)]
        fill: Fill,
    },
    /// Vertical cylinder; voxels whose centers lie within `radius` of `center` and in `[z_min, z_max)`.
    Cylinder {
        center: [f64; 2],
        radius: f64,
        z_min: f64,
        z_max: f64,
        #[serde(default)]
        fill: Fill,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WorldDoc {
    pub dims: [usize; 3],
    pub resolution: f64,
    #[serde(default)]
    pub ground_height: f64,
    /// Surround the grid with one-voxel occupied side walls.
    #[serde(default)]
    pub boundary_walls: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solids: Vec<Solid>,
    /// `[start, length]` runs over linear voxel indices (x fastest).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub occupied_runs: Vec<[usize; 2]>,
    /// Snapshot-only: runs of voxels whose label is unknown.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unknown_runs: Vec<[usize; 2]>,
    /// Seeds for the free-space flood that defines observable space; empty floods
    /// from every free voxel.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reachable_from: Vec<[f64; 3]>,
    /// Boxes excluded from the coverage denominator.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unreachable: Vec<BoxRegion>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<NamedRegion>,
}

fn bad(message: impl Into<String>) -> Error {
    Error::Parse {
        what: "world".into(),
        message: message.into(),
    }
}

impl WorldDoc {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| bad(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("world documents always serialize")
    }

    fn grid(&self) -> Result<Grid> {
        let [nx, ny, nz] = self.dims;
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(bad("dims must be positive"));
        }
        if !(self.resolution > 0.0) {
            return Err(bad("resolution must be positive"));
        }
        Ok(Grid::new(Dims::new(nx, ny, nz), self.resolution))
    }

    fn occupancy(&self, grid: &Grid) -> Result<Vec<bool>> {
        let dims = grid.dims;
        let mut occ = vec![false; dims.len()];
        if self.boundary_walls {
            for k in 0..dims.nz {
                for j in 0..dims.ny {
                    for i in 0..dims.nx {
                        if i == 0 || j == 0 || i + 1 == dims.nx || j + 1 == dims.ny {
                            occ[dims.index(i, j, k)] = true;
                        }
                    }
                }
            }
        }
        for solid in &self.solids {
            for (idx, slot) in occ.iter_mut().enumerate() {
                let c = grid.center(idx);
                let (inside, fill) = match solid {
                    Solid::Box { min, max, fill } => (in_box(c, min, max), *fill),
                    Solid::Cylinder {
                        center,
                        radius,
                        z_min,
                        z_max,
                        fill,
                    } => (
                        (c.x - center[0]).hypot(c.y - center[1]) <= *radius
                            && c.z >= *z_min
                            && c.z < *z_max,
                        *fill,
                    ),
                };
                if inside {
                    *slot = fill == Fill::Occupied;
                }
            }
        }
        for_runs(&self.occupied_runs, dims.len(), |i| occ[i] = true)?;
        Ok(occ)
    }

    pub fn build(&self) -> Result<WorldModel> {
        let grid = self.grid()?;
        if !(0.0..=grid.extent().z).contains(&self.ground_height) {
            return Err(bad("ground_height outside the grid"));
        }
        let occ = self.occupancy(&grid)?;
        let mut world = WorldModel::new(grid, occ, self.ground_height, None, self.regions.clone());
        let seeds = self
            .reachable_from
            .iter()
            .map(|p| Vec3::new(p[0], p[1], p[2]))
            .collect::<Vec<_>>();
        let mut mask = world.connected_reachable_mask(&seeds);
        for b in &self.unreachable {
            for (idx, m) in mask.iter_mut().enumerate() {
                if in_box(grid.center(idx), &b.min, &b.max) {
                    *m = false;
                }
            }
        }
        world.set_reachable_mask(mask);
        Ok(world)
    }

    /// Snapshot of a map: occupied and unknown voxels as runs.
    pub fn snapshot(map: &VoxelMap, ground_height: f64) -> Self {
        let grid = map.grid();
        Self {
            dims: grid.dims.as_array(),
            resolution: grid.resolution,
            ground_height,
            occupied_runs: runs(map.cells().iter().map(|&c| c == Occupancy::Occupied)),
            unknown_runs: runs(map.cells().iter().map(|&c| c == Occupancy::Unknown)),
            ..Self::default()
        }
    }

    /// Rebuilds the map stored in a snapshot.
    pub fn to_map(&self) -> Result<VoxelMap> {
        let grid = self.grid()?;
        let occ = self.occupancy(&grid)?;
        let mut cells = occ
            .into_iter()
            .map(|o| if o { Occupancy::Occupied } else { Occupancy::Free })
            .collect::<Vec<_>>();
        for_runs(&self.unknown_runs, cells.len(), |i| cells[i] = Occupancy::Unknown)?;
        Ok(VoxelMap::from_cells(grid.dims, grid.resolution, cells))
    }
}

fn in_box(c: Vec3, min: &[f64; 3], max: &[f64; 3]) -> bool {
    c.x >= min[0] && c.x < max[0] && c.y >= min[1] && c.y < max[1] && c.z >= min[2] && c.z < max[2]
}

fn for_runs(runs: &[[usize; 2]], len: usize, mut f: impl FnMut(usize)) -> Result<()> {
    for &[start, n] in runs {
        if start + n > len {
            return Err(bad(format!("run [{start}, {n}] exceeds {len} voxels")));
        }
        (start..start + n).for_each(&mut f);
    }
    Ok(())
}

fn runs(flags: impl Iterator<Item = bool>) -> Vec<[usize; 2]> {
    let mut out: Vec<[usize; 2]> = Vec::new();
    for (i, f) in flags.enumerate() {
        if !f {
            continue;
        }
        match out.last_mut() {
            Some(run) if run[0] + run[1] == i => run[1] += 1,
            _ => out.push([i, 1]),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_solids_and_runs() {
        let doc = WorldDoc::from_toml(
            r#"
            dims = [10, 10, 5]
            resolution = 0.2
            occupied_runs = [[0, 3]]

            [[solids]]
            kind = "box"
            min = [0.4, 0.4, 0.0]
            max = [0.8, 0.8, 0.4]

            [[solids]]
            kind = "box"
            min = [0.4, 0.4, 0.0]
            max = [0.6, 0.6, 0.2]
            fill = "free"
            "#,
        )
        .unwrap();
        let world = doc.build().unwrap();
        let dims = world.dims();
        assert!(world.is_occupied(0) && world.is_occupied(2) && !world.is_occupied(3));
        assert!(world.is_occupied(dims.index(3, 3, 1)));
        assert!(!world.is_occupied(dims.index(2, 2, 0)));
        assert_eq!(world.occupied().iter().filter(|&&o| o).count(), 3 + 8 - 1);
    }

    #[test]
    fn snapshot_round_trips_through_text() {
        let world = WorldModel::open(Dims::new(6, 5, 4), 0.25);
        let mut map = VoxelMap::for_world(&world);
        map.set(7, Occupancy::Free);
        map.set(8, Occupancy::Occupied);
        map.set(50, Occupancy::Occupied);
        let text = WorldDoc::snapshot(&map, 0.0).to_toml();
        let back = WorldDoc::from_toml(&text).unwrap().to_map().unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn rejects_out_of_range_runs() {
        let doc = WorldDoc {
            dims: [2, 2, 2],
            resolution: 1.0,
            occupied_runs: vec![[6, 3]],
            ..WorldDoc::default()
        };
        assert!(matches!(doc.build(), Err(Error::Parse { .. })));
    }

    #[test]
    fn sealed_cavities_and_solid_interiors_are_residual() {
        let doc = WorldDoc {
            dims: [7, 7, 7],
            resolution: 1.0,
            solids: vec![
                Solid::Box {
                    min: [1.0, 1.0, 1.0],
                    max: [6.0, 6.0, 6.0],
                    fill: Fill::Occupied,
                },
                Solid::Box {
                    min: [3.0, 3.0, 3.0],
                    max: [4.0, 4.0, 4.0],
                    fill: Fill::Free,
                },
            ],
            reachable_from: vec![[0.5, 0.5, 0.5]],
            ..WorldDoc::default()
        };
        let world = doc.build().unwrap();
        let d = world.dims();
        assert!(!world.is_reachable(d.index(3, 3, 3)), "sealed cavity");
        assert!(!world.is_reachable(d.index(2, 2, 2)), "solid interior");
        assert!(world.is_reachable(d.index(1, 3, 3)), "outer face");
        // 7^3 minus the 3^3 interior block (cavity included).
        assert_eq!(world.reachable_count(), 343 - 27);
    }
}
