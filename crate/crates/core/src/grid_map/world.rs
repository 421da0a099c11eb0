use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Dims, Grid};
use crate::geometry::Vec3;

/// Axis-aligned box in meters used to tag parts of a world (e.g. "tunnel", "deck").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedRegion {
    pub name: String,
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl NamedRegion {
    pub fn contains(&self, p: Vec3) -> bool {
        let q = [p.x, p.y, p.z];
        (0..3).all(|a| q[a] >= self.min[a] && q[a] < self.max[a])
    }
}

/// Ground-truth voxel world.
#[derive(Debug, Clone)]
pub struct WorldModel {
    grid: Grid,
    occupied: Vec<bool>,
    ground_height: f64,
    reachable: Vec<bool>,
    regions: Vec<NamedRegion>,
}

impl WorldModel {
    /// Builds a world; `reachable` defaults to every voxel when `None`.
    pub fn new(
        grid: Grid,
        occupied: Vec<bool>,
        ground_height: f64,
        reachable: Option<Vec<bool>>,
        regions: Vec<NamedRegion>,
    ) -> Self {
        assert_eq!(occupied.len(), grid.dims.len());
        let reachable = reachable.unwrap_or_else(|| vec![true; grid.dims.len()]);
        assert_eq!(reachable.len(), grid.dims.len());
        assert!(
            ground_height >= 0.0 && ground_height <= grid.extent().z,
            "ground height outside the grid"
        );
        Self {
            grid,
            occupied,
            ground_height,
            reachable,
            regions,
        }
    }

    /// Empty world with every voxel free and reachable.
    pub fn open(dims: Dims, resolution: f64) -> Self {
        Self::new(
            Grid::new(dims, resolution),
            vec![false; dims.len()],
            0.0,
            None,
            Vec::new(),
        )
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> Dims {
        self.grid.dims
    }

    pub fn resolution(&self) -> f64 {
        self.grid.resolution
    }

    pub fn ground_height(&self, _x: f64, _y: f64) -> f64 {
        self.ground_height
    }

    #[inline]
    pub fn is_occupied(&self, idx: usize) -> bool {
        self.occupied[idx]
    }

    pub fn is_occupied_at(&self, p: Vec3) -> bool {
        self.grid.voxel_of(p).is_some_and(|i| self.occupied[i])
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    #[inline]
    pub fn is_reachable(&self, idx: usize) -> bool {
        self.reachable[idx]
    }

    pub fn reachable_mask(&self) -> &[bool] {
        &self.reachable
    }

    pub fn reachable_count(&self) -> usize {
        self.reachable.iter().filter(|&&r| r).count()
    }

    pub fn regions(&self) -> &[NamedRegion] {
        &self.regions
    }

    pub fn region(&self, name: &str) -> Option<&NamedRegion> {
        self.regions.iter().find(|r| r.name == name)
    }

    /// Sets a voxel's truth label. Only meaningful while constructing a world.
    pub fn set_occupied(&mut self, idx: usize, occupied: bool) {
        self.occupied[idx] = occupied;
    }

    pub fn set_reachable_mask(&mut self, mask: Vec<bool>) {
        assert_eq!(mask.len(), self.grid.dims.len());
        self.reachable = mask;
    }

    /// Observable-space mask: free voxels 6-connected to any seed, plus occupied voxels
    /// sharing a face with such a free voxel. An empty seed list floods from every free voxel.
    pub fn connected_reachable_mask(&self, seeds: &[Vec3]) -> Vec<bool> {
        let dims = self.grid.dims;
        let mut free_seen = vec![false; dims.len()];
        let mut queue = VecDeque::new();
        if seeds.is_empty() {
            for (i, &occ) in self.occupied.iter().enumerate() {
                if !occ {
                    free_seen[i] = true;
                }
            }
        } else {
            for &s in seeds {
                if let Some(i) = self.grid.voxel_of(s) {
                    if !self.occupied[i] && !free_seen[i] {
                        free_seen[i] = true;
                        queue.push_back(i);
                    }
                }
            }
            while let Some(i) = queue.pop_front() {
                for n in face_neighbors(dims, i) {
                    if !self.occupied[n] && !free_seen[n] {
                        free_seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        let mut mask = free_seen.clone();
        for i in 0..dims.len() {
            if self.occupied[i] && face_neighbors(dims, i).any(|n| free_seen[n]) {
                mask[i] = true;
            }
        }
        mask
    }
}

pub(crate) fn face_neighbors(dims: Dims, idx: usize) -> impl Iterator<Item = usize> {
    let [i, j, k] = dims.coords(idx);
    const OFFSETS: [[i64; 3]; 6] = [
        [1, 0, 0],
        [-1, 0, 0],
        [0, 1, 0],
        [0, -1, 0],
        [0, 0, 1],
        [0, 0, -1],
    ];
    OFFSETS.into_iter().filter_map(move |o| {
        let c = [i as i64 + o[0], j as i64 + o[1], k as i64 + o[2]];
        dims.contains_signed(c)
            .then(|| dims.index(c[0] as usize, c[1] as usize, c[2] as usize))
    })
}
