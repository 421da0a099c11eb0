use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rx_core::frontier::{detect_frontiers, weighted_sample_frontier, FrontierCircle};
use rx_core::{Dims, Occupancy, VoxelMap};

/// Map with slice k = 1 entirely free except the listed unknown cells; other slices unknown.
fn slice_map(unknown: &[(usize, usize)]) -> VoxelMap {
    let dims = Dims::new(20, 16, 3);
    let mut map = VoxelMap::unknown(dims, 0.25);
    for j in 0..dims.ny {
        for i in 0..dims.nx {
            map.set(dims.index(i, j, 1), Occupancy::Free);
        }
    }
    for &(i, j) in unknown {
        map.set(dims.index(i, j, 1), Occupancy::Unknown);
    }
    map
}

fn rect(i0: usize, j0: usize, w: usize, h: usize) -> Vec<(usize, usize)> {
    (j0..j0 + h).flat_map(|j| (i0..i0 + w).map(move |i| (i, j))).collect()
}

/// Exhaustive eligibility: unknown and edge-adjacent to a free cell.
fn oracle_eligible(map: &VoxelMap, k: usize) -> Vec<(usize, usize)> {
    let d = map.dims();
    let mut out = Vec::new();
    for j in 0..d.ny {
        for i in 0..d.nx {
            if map.get(d.index(i, j, k)) != Occupancy::Unknown {
                continue;
            }
            let nbrs = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)];
            let adj = nbrs.iter().any(|&(di, dj)| {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                ni >= 0
                    && nj >= 0
                    && (ni as usize) < d.nx
                    && (nj as usize) < d.ny
                    && map.get(d.index(ni as usize, nj as usize, k)) == Occupancy::Free
            });
            if adj {
                out.push((i, j));
            }
        }
    }
    out
}

#[test]
fn rectangular_unknown_region_yields_one_circle_of_boundary_cells() {
    let map = slice_map(&rect(4, 5, 5, 4));
    let fs = detect_frontiers(&map, &[0.3], 3);
    let eligible = oracle_eligible(&map, 1);
    // 5 x 4 block: interior 3 x 2 cells have no free neighbour.
    assert_eq!(eligible.len(), 20 - 6);
    assert_eq!(fs.len(), 1);
    assert_eq!(fs[0].area_weight as usize, eligible.len());
    let cx = eligible.iter().map(|&(i, _)| (i as f64 + 0.5) * 0.25).sum::<f64>() / 14.0;
    let cy = eligible.iter().map(|&(_, j)| (j as f64 + 0.5) * 0.25).sum::<f64>() / 14.0;
    assert!((fs[0].center[0] - cx).abs() < 1e-12 && (fs[0].center[1] - cy).abs() < 1e-12);
    let r = (14.0 * 0.0625 / std::f64::consts::PI).sqrt();
    assert!((fs[0].radius - r).abs() < 1e-12);
    assert_eq!(fs[0].z, 0.3);
}

#[test]
fn regions_split_by_free_corridor_give_two_circles() {
    let mut unknown = rect(2, 2, 4, 6);
    unknown.extend(rect(7, 2, 4, 6));
    let map = slice_map(&unknown);
    let fs = detect_frontiers(&map, &[0.3], 3);
    assert_eq!(fs.len(), 2);
    let total: u64 = fs.iter().map(|f| f.area_weight).sum();
    assert_eq!(total as usize, oracle_eligible(&map, 1).len());
    // Diagonal contact merges blobs under 8-connectivity.
    let mut touching = rect(2, 2, 3, 3);
    touching.extend(rect(5, 5, 3, 3));
    let fs = detect_frontiers(&slice_map(&touching), &[0.3], 3);
    assert_eq!(fs.len(), 1);
}

#[test]
fn small_blobs_below_threshold_are_dropped() {
    let map = slice_map(&[(3, 3), (4, 3)]);
    assert!(detect_frontiers(&map, &[0.3], 3).is_empty());
    assert_eq!(detect_frontiers(&map, &[0.3], 2).len(), 1);
}

fn circle(w: u64) -> FrontierCircle {
    FrontierCircle {
        center: [w as f64, 0.0],
        radius: 1.0,
        z: 0.0,
        area_weight: w,
    }
}

#[test]
fn weighted_sampling_follows_area_weights() {
    let fs = [circle(30), circle(10)];
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let n = 10_000;
    let heavy = (0..n)
        .filter(|_| weighted_sample_frontier(&fs, &mut rng).unwrap().area_weight == 30)
        .count() as f64;
    let light = n as f64 - heavy;
    let (e1, e2) = (n as f64 * 0.75, n as f64 * 0.25);
    let chi2 = (heavy - e1).powi(2) / e1 + (light - e2).powi(2) / e2;
    // 1 degree of freedom, 99.9% quantile.
    assert!(chi2 < 10.83, "chi2 = {chi2}");
}

#[test]
fn equal_weights_sample_uniformly() {
    let fs = [circle(5), circle(5), circle(5), circle(5)];
    let fs: Vec<FrontierCircle> = fs
        .into_iter()
        .enumerate()
        .map(|(i, mut c)| {
            c.center[0] = i as f64;
            c
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut counts = [0f64; 4];
    let n = 8_000;
    for _ in 0..n {
        counts[weighted_sample_frontier(&fs, &mut rng).unwrap().center[0] as usize] += 1.0;
    }
    let e = n as f64 / 4.0;
    let chi2: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
    // 3 degrees of freedom, 99.9% quantile.
    assert!(chi2 < 16.27, "chi2 = {chi2}");
}

#[test]
fn detection_is_deterministic_and_sorted() {
    let mut unknown = rect(2, 2, 3, 3);
    unknown.extend(rect(10, 2, 6, 8));
    let map = slice_map(&unknown);
    let a = detect_frontiers(&map, &[0.3, 0.3], 3);
    let b = detect_frontiers(&map, &[0.3, 0.3], 3);
    assert_eq!(a, b);
    assert!(a.windows(2).all(|w| w[0].area_weight >= w[1].area_weight));
}
