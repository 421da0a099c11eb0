mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rx_core::roadmap::{
    expand_roadmap, is_config_free, project_config, segment_free, shortest_path,
    validate_rendezvous_edge, BodyModel, EdgeKind, NodeOrigin, Roadmap, SamplingParams,
};
use rx_core::{Config, Dims, Error, Layer, Occupancy, Vec3, VoxelMap, WorldModel};

const R: f64 = 0.2;

fn bodies() -> BodyModel {
    BodyModel {
        altitude_max: 2.5,
        ..BodyModel::default()
    }
}

fn open_world(nx: usize, ny: usize, nz: usize) -> WorldModel {
    WorldModel::open(Dims::new(nx, ny, nz), R)
}

/// Re-checks every structural invariant of a roadmap against a map.
fn audit(g: &Roadmap, map: &VoxelMap, p: &SamplingParams, b: &BodyModel) {
    for n in g.nodes() {
        assert!(is_config_free(map, &n.config, b), "node {} in collision", n.id);
        match n.origin {
            NodeOrigin::Frontier | NodeOrigin::Local | NodeOrigin::Global => {
                if let Some(d) = n.nn_distance {
                    assert!(d >= p.d_min && d <= p.d_max, "node {} spacing {d}", n.id);
                }
                if n.config.layer == Layer::Uav {
                    let z = n.config.position.z;
                    assert!(z >= b.altitude_min && z <= b.altitude_max);
                }
            }
            NodeOrigin::Projection => assert_eq!(n.config.layer, Layer::Ugv),
            NodeOrigin::Anchor => {}
        }
    }
    for e in g.edges() {
        let (a, c) = (g.node(e.a), g.node(e.b));
        let len = a.config.position.distance(c.config.position);
        assert!((e.length - len).abs() < 1e-12);
        match e.kind {
            EdgeKind::Rendezvous => {
                assert_eq!(a.config.layer, Layer::Uav);
                assert_eq!(c.config.layer, Layer::Ugv);
                assert_eq!(a.config.position.x, c.config.position.x);
                assert_eq!(a.config.position.y, c.config.position.y);
                assert!(validate_rendezvous_edge(map, &a.config, &c.config));
            }
            k => {
                assert_eq!(a.config.layer, c.config.layer);
                assert_eq!(EdgeKind::from(a.config.layer), k);
                assert!(e.length <= p.d_max + 1e-12);
                assert!(segment_free(map, &a.config, c.config.position, b));
            }
        }
    }
}

#[test]
fn fully_mapped_box_bootstraps_both_layers() {
    let world = open_world(30, 30, 15);
    let map = VoxelMap::fully_mapped(&world);
    let (p, b) = (SamplingParams::default(), bodies());
    let mut g = Roadmap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let st = expand_roadmap(
        &mut g,
        &map,
        &world,
        &Config::aerial(3.0, 3.0, 1.0, 0.0),
        &Config::ground(3.0, 3.0, 0.0),
        &p,
        &b,
        &mut rng,
    );
    assert!(g.layer_count(Layer::Uav) >= 1);
    assert!(g.layer_count(Layer::Ugv) >= 1);
    assert_eq!(st.frontier_uav + st.frontier_ugv, 0, "no frontiers in a fully mapped map");
    assert_eq!(st.added(), g.len());
    assert!(g.edges().iter().any(|e| e.kind == EdgeKind::Rendezvous));
    audit(&g, &map, &p, &b);
}

#[test]
fn map_without_free_voxels_leaves_graph_unchanged() {
    let world = open_world(20, 20, 10);
    let map = VoxelMap::for_world(&world);
    let mut g = Roadmap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let st = expand_roadmap(
        &mut g,
        &map,
        &world,
        &Config::aerial(2.0, 2.0, 1.0, 0.0),
        &Config::ground(2.0, 2.0, 0.0),
        &SamplingParams::default(),
        &bodies(),
        &mut rng,
    );
    assert_eq!(st.added(), 0);
    assert!(g.is_empty());
}

/// Partially mapped world: a known free disc of radius 3 m around (4, 4).
fn partial_map(world: &WorldModel) -> VoxelMap {
    let mut map = VoxelMap::for_world(world);
    let grid = map.grid();
    for i in 0..grid.dims.len() {
        let c = grid.center(i);
        if c.distance_xy(Vec3::new(4.0, 4.0, 0.0)) < 3.0 {
            map.set(i, Occupancy::Free);
        }
    }
    map
}

#[test]
fn frontier_sampling_terminates_and_growth_is_monotone() {
    let world = open_world(50, 50, 15);
    let map = partial_map(&world);
    let (p, b) = (SamplingParams::default(), bodies());
    let mut g = Roadmap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (cu, cg) = (Config::aerial(4.0, 4.0, 1.0, 0.0), Config::ground(4.0, 4.0, 0.0));
    let mut prev_nodes = Vec::new();
    let mut prev_edges = Vec::new();
    for round in 0..3 {
        let st = expand_roadmap(&mut g, &map, &world, &cu, &cg, &p, &b, &mut rng);
        if round > 0 {
            // Both layers are populated, so every frontier stage runs to its failure cap;
            // the kNN batch in progress may finish past it.
            let cap = |n: usize, f: usize| f >= n && f < n + p.k_neighbors;
            assert!(cap(p.n_max_uav, st.failures_uav), "{}", st.failures_uav);
            assert!(cap(p.n_max_ugv, st.failures_ugv), "{}", st.failures_ugv);
        }
        assert_eq!(&g.nodes()[..prev_nodes.len()], &prev_nodes[..]);
        assert_eq!(&g.edges()[..prev_edges.len()], &prev_edges[..]);
        prev_nodes = g.nodes().to_vec();
        prev_edges = g.edges().to_vec();
        audit(&g, &map, &p, &b);
    }
    assert!(g.nodes().iter().any(|n| n.origin == NodeOrigin::Frontier));
}

#[test]
fn expansion_is_deterministic_per_seed() {
    let world = open_world(40, 40, 15);
    let map = partial_map(&world);
    let run = |seed| {
        let mut g = Roadmap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..2 {
            expand_roadmap(
                &mut g,
                &map,
                &world,
                &Config::aerial(4.0, 4.0, 1.0, 0.0),
                &Config::ground(4.0, 4.0, 0.0),
                &SamplingParams::default(),
                &bodies(),
                &mut rng,
            );
        }
        g.export()
    };
    assert_eq!(run(5), run(5));
}

/// Dense point-sampling oracle for the UGV footprint at a voxel-centered pose.
fn cylinder_free_oracle(map: &VoxelMap, x: f64, y: f64, b: &BodyModel) -> bool {
    let grid = map.grid();
    let n = 60;
    for a in 0..=n {
        for c in 0..=n {
            for h in 1..20 {
                let px = x - b.ugv_radius + 2.0 * b.ugv_radius * a as f64 / n as f64;
                let py = y - b.ugv_radius + 2.0 * b.ugv_radius * c as f64 / n as f64;
                if (px - x).hypot(py - y) >= b.ugv_radius - 1e-6 {
                    continue;
                }
                let pz = b.ugv_height * h as f64 / 20.0;
                match grid.voxel_of(Vec3::new(px, py, pz)) {
                    Some(i) if map.get(i) == Occupancy::Free => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

fn random_labels(world: &WorldModel, seed: u64) -> VoxelMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut map = VoxelMap::for_world(world);
    for i in 0..world.dims().len() {
        let u: f64 = rng.gen();
        map.set(
            i,
            if u < 0.85 {
                Occupancy::Free
            } else if u < 0.93 {
                Occupancy::Occupied
            } else {
                Occupancy::Unknown
            },
        );
    }
    map
}

#[test]
fn projection_examples_and_classification_oracle() {
    let world = open_world(20, 20, 10);
    let b = bodies();
    let mut map = VoxelMap::fully_mapped(&world);
    let up = Config::aerial(1.1, 1.3, 1.5, 0.7);
    let down = project_config(&up, &map, &world, &b).expect("open ground");
    assert_eq!((down.position.x, down.position.y, down.position.z), (1.1, 1.3, 0.0));
    assert_eq!(down.yaw, 0.7);
    assert_eq!(down.layer, Layer::Ugv);

    let idx = map.grid().voxel_of(Vec3::new(1.1, 1.3, 0.1)).unwrap();
    map.set(idx, Occupancy::Occupied);
    assert!(project_config(&up, &map, &world, &b).is_none());
    map.set(idx, Occupancy::Unknown);
    assert!(project_config(&up, &map, &world, &b).is_none());
    assert!(project_config(&Config::aerial(-0.5, 1.0, 1.0, 0.0), &map, &world, &b).is_none());

    for seed in 0..4 {
        let map = random_labels(&world, seed);
        for i in 1..19 {
            for j in 1..19 {
                let (x, y) = ((i as f64 + 0.5) * R, (j as f64 + 0.5) * R);
                let got = project_config(&Config::aerial(x, y, 1.5, 0.0), &map, &world, &b).is_some();
                assert_eq!(got, cylinder_free_oracle(&map, x, y, &b), "seed {seed} cell {i},{j}");
            }
        }
    }
}

#[test]
fn rendezvous_column_validation() {
    let world = open_world(10, 10, 10);
    let mut map = VoxelMap::fully_mapped(&world);
    let up = Config::aerial(1.0, 1.0, 1.5, 0.0);
    let down = Config::ground(1.0, 1.0, 0.0);
    assert!(validate_rendezvous_edge(&map, &up, &down));
    let mid = map.grid().voxel_of(Vec3::new(1.0, 1.0, 0.7)).unwrap();
    map.set(mid, Occupancy::Occupied);
    assert!(!validate_rendezvous_edge(&map, &up, &down));
    map.set(mid, Occupancy::Unknown);
    assert!(!validate_rendezvous_edge(&map, &up, &down));
    assert!(!validate_rendezvous_edge(&map, &up, &Config::ground(1.2, 1.0, 0.0)));

    // Column-scan oracle on random labels.
    for seed in 0..3 {
        let map = random_labels(&world, 100 + seed);
        for i in 0..10 {
            for j in 0..10 {
                let (x, y) = ((i as f64 + 0.3) * R, (j as f64 + 0.6) * R);
                for top in [0.25, 0.9, 1.45] {
                    let k_top = (top / R).floor() as usize;
                    let expect = (0..=k_top).all(|k| map.get(world.dims().index(i, j, k)) == Occupancy::Free);
                    let got = validate_rendezvous_edge(
                        &map,
                        &Config::aerial(x, y, top, 0.0),
                        &Config::ground(x, y, 0.0),
                    );
                    assert_eq!(got, expect);
                }
            }
        }
    }
}

fn abstract_graph(n: usize) -> Roadmap {
    let mut g = Roadmap::new();
    for i in 0..n {
        g.add_node(Config::aerial(i as f64, 0.0, 1.0, 0.0));
    }
    g
}

#[test]
fn shortest_path_examples() {
    let mut g = abstract_graph(3);
    g.add_weighted_edge(0, 1, 1.0).unwrap();
    g.add_weighted_edge(1, 2, 1.0).unwrap();
    g.add_weighted_edge(0, 2, 2.5).unwrap();
    assert_eq!(shortest_path(&g, Layer::Uav, 0, 0).unwrap(), (vec![0], 0.0));
    assert_eq!(shortest_path(&g, Layer::Uav, 0, 2).unwrap(), (vec![0, 1, 2], 2.0));

    let mut g = abstract_graph(3);
    g.add_weighted_edge(0, 1, 1.0).unwrap();
    assert_eq!(
        shortest_path(&g, Layer::Uav, 0, 2),
        Err(Error::NoPath { from: 0, to: 2 })
    );
    assert_eq!(shortest_path(&g, Layer::Ugv, 0, 1), Err(Error::WrongLayer(0)));
}

#[test]
fn rendezvous_edges_are_not_traversed() {
    let mut g = Roadmap::new();
    let a = g.add_node(Config::aerial(0.0, 0.0, 1.0, 0.0));
    let b = g.add_node(Config::ground(0.0, 0.0, 0.0));
    let c = g.add_node(Config::ground(1.0, 0.0, 0.0));
    let d = g.add_node(Config::aerial(1.0, 0.0, 1.0, 0.0));
    g.link_rendezvous(a, b).unwrap();
    g.link_rendezvous(d, c).unwrap();
    g.add_weighted_edge(b, c, 1.0).unwrap();
    assert!(matches!(shortest_path(&g, Layer::Uav, a, d), Err(Error::NoPath { .. })));
    assert!(g.add_weighted_edge(a, b, 1.0).is_err());
}

/// Random geometric graph with lengths on a coarse lattice so equal-length paths occur.
fn random_geometric(n: usize, seed: u64) -> Roadmap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Roadmap::new();
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0..6) as f64, rng.gen_range(0..6) as f64))
        .collect();
    for (i, &(x, y)) in pts.iter().enumerate() {
        g.add_node(Config::aerial(x + 0.01 * i as f64, y, 1.0, 0.0));
    }
    for a in 0..n {
        for b in a + 1..n {
            let d = (pts[a].0 - pts[b].0).abs() + (pts[a].1 - pts[b].1).abs();
            if d <= 4.0 && rng.gen_bool(0.6) {
                g.add_weighted_edge(a, b, d.max(1.0)).unwrap();
            }
        }
    }
    g
}

#[test]
fn shortest_path_matches_exhaustive_enumeration() {
    for seed in 0..40 {
        let g = random_geometric(12, seed);
        for from in 0..12 {
            for to in 0..12 {
                let oracle = common::best_simple_path(g.adjacency(), from, to);
                match (shortest_path(&g, Layer::Uav, from, to), oracle) {
                    (Ok((p, l)), Some((ol, op))) => {
                        assert_eq!(l, ol, "seed {seed} {from}->{to}");
                        assert_eq!(p, op, "seed {seed} {from}->{to}");
                    }
                    (Err(Error::NoPath { .. }), None) => {}
                    (got, want) => panic!("seed {seed} {from}->{to}: {got:?} vs {want:?}"),
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn shortest_paths_obey_triangle_inequality(seed in 0u64..10_000) {
        let g = random_geometric(10, seed);
        let d = |a, b| shortest_path(&g, Layer::Uav, a, b).ok().map(|(_, l)| l);
        for a in 0..10 {
            for b in 0..10 {
                for c in 0..10 {
                    if let (Some(ac), Some(ab), Some(bc)) = (d(a, c), d(a, b), d(b, c)) {
                        prop_assert!(ac <= ab + bc + 1e-9);
                    }
                }
            }
        }
    }
}
