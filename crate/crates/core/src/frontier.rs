//! Slice-based frontier detection.
//!
//! Each horizontal slice of the map is classified cell by cell: a cell is frontier-eligible
//! when it is unknown and shares an edge with a free cell of the same slice. Eligible cells
//! are grouped into 8-connected blobs, and every blob of at least `min_blob_cells` cells is
//! summarized as a circle that steers roadmap growth.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_map::{Occupancy, VoxelMap};

pub const DEFAULT_MIN_BLOB_CELLS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierCircle {
    /// Meters, `(x, y)`.
    pub center: [f64; 2],
    /// Meters; the radius of a disc with the blob's area.
    pub radius: f64,
    /// Slice height in meters.
    pub z: f64,
    /// Number of cells in the source blob.
    pub area_weight: u64,
}

/// Slice-local frontier eligibility of cell `(i, j)` at layer `k`.
pub fn is_frontier_cell(map: &VoxelMap, i: usize, j: usize, k: usize) -> bool {
    let d = map.dims();
    if map.get(d.index(i, j, k)) != Occupancy::Unknown {
        return false;
    }
    let free = |i: usize, j: usize| map.get(d.index(i, j, k)) == Occupancy::Free;
    (i > 0 && free(i - 1, j))
        || (i + 1 < d.nx && free(i + 1, j))
        || (j > 0 && free(i, j - 1))
        || (j + 1 < d.ny && free(i, j + 1))
}

pub fn detect_frontiers(
    map: &VoxelMap,
    slice_heights: &[f64],
    min_blob_cells: usize,
) -> Vec<FrontierCircle> {
    let d = map.dims();
    let r = map.resolution();
    let mut circles = Vec::new();
    for &z in slice_heights {
        let k = ((z / r).floor().max(0.0) as usize).min(d.nz - 1);
        let eligible: Vec<bool> = (0..d.nx * d.ny)
            .map(|c| is_frontier_cell(map, c % d.nx, c / d.nx, k))
            .collect();
        let mut seen = vec![false; eligible.len()];
        let mut stack = Vec::new();
        for start in 0..eligible.len() {
            if !eligible[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let (mut count, mut sx, mut sy) = (0u64, 0.0, 0.0);
            while let Some(c) = stack.pop() {
                let (i, j) = ((c % d.nx) as i64, (c / d.nx) as i64);
                count += 1;
                sx += (i as f64 + 0.5) * r;
                sy += (j as f64 + 0.5) * r;
                for dj in -1..=1 {
                    for di in -1..=1 {
                        let (ni, nj) = (i + di, j + dj);
                        if ni < 0 || nj < 0 || ni >= d.nx as i64 || nj >= d.ny as i64 {
                            continue;
                        }
                        let n = nj as usize * d.nx + ni as usize;
                        if eligible[n] && !seen[n] {
                            seen[n] = true;
                            stack.push(n);
                        }
                    }
                }
            }
            if count as usize >= min_blob_cells.max(1) {
                let area = count as f64 * r * r;
                circles.push(FrontierCircle {
                    center: [sx / count as f64, sy / count as f64],
                    radius: (area / std::f64::consts::PI).sqrt(),
                    z,
                    area_weight: count,
                });
            }
        }
    }
    circles.sort_by_key(|c| std::cmp::Reverse(c.area_weight));
    circles
}

/// Picks a circle with probability proportional to its area weight.
pub fn weighted_sample_frontier<'a, R: Rng + ?Sized>(
    frontiers: &'a [FrontierCircle],
    rng: &mut R,
) -> Result<&'a FrontierCircle> {
    let total: u64 = frontiers.iter().map(|f| f.area_weight).sum();
    if total == 0 {
        return Err(Error::NoFrontiers);
    }
    let mut pick = rng.gen_range(0..total);
    for f in frontiers {
        if pick < f.area_weight {
            return Ok(f);
        }
        pick -= f.area_weight;
    }
    unreachable!("pick is below the total weight")
}

/// Summed area weight of all circles.
pub fn total_weight(frontiers: &[FrontierCircle]) -> u64 {
    frontiers.iter().map(|f| f.area_weight).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_map::{Dims, WorldModel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn circle(w: u64) -> FrontierCircle {
        FrontierCircle {
            center: [0.0, 0.0],
            radius: 1.0,
            z: 0.5,
            area_weight: w,
        }
    }

    #[test]
    fn fully_mapped_map_has_no_frontiers() {
        let world = WorldModel::open(Dims::new(12, 12, 4), 0.25);
        let map = VoxelMap::fully_mapped(&world);
        assert!(detect_frontiers(&map, &[0.3, 0.6], 3).is_empty());
    }

    #[test]
    fn single_circle_is_always_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fs = [circle(7)];
        for _ in 0..50 {
            assert_eq!(weighted_sample_frontier(&fs, &mut rng).unwrap(), &fs[0]);
        }
        assert_eq!(weighted_sample_frontier(&[], &mut rng), Err(Error::NoFrontiers));
    }
}
