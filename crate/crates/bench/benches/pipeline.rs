use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rx_bench::{scenario, snapshot};
use rx_core::coordination::layer_instance;
use rx_core::mission::{run, Strategy};
use rx_core::op_solver::solve_op;
use rx_core::roadmap::{expand_layers, Roadmap};
use rx_core::{Config, Layer};

const SCENE: &str = "env1_tunnel_scaffold";

fn sensing(c: &mut Criterion) {
    let (sc, out) = snapshot(SCENE, 0.5);
    let cfg = sc.config(Strategy::Proposed, 0);
    let pose = out.roadmap.layer_nodes(Layer::Uav).max_by_key(|n| n.reward).expect("aerial nodes").config;
    c.bench_function("yaw_gains", |b| b.iter(|| out.map.yaw_gains(pose.position, &cfg.sensor_uav).unwrap()));
    c.bench_function("integrate_scan", |b| {
        b.iter_batched(
            || out.map.clone(),
            |mut m| m.integrate_scan(&sc.world, &pose, &cfg.sensor_uav).unwrap(),
            BatchSize::LargeInput,
        )
    });
}

fn planning(c: &mut Criterion) {
    let (sc, out) = snapshot(SCENE, 0.5);
    let cfg = sc.config(Strategy::Proposed, 0);
    let home = out.roadmap.layer_nodes(Layer::Uav).next().expect("aerial nodes").id;
    let inst = layer_instance(&out.roadmap, Layer::Uav, home, home, cfg.uav_budget()).unwrap();
    c.bench_function("solve_op_uav_loop", |b| b.iter(|| solve_op(&inst, &mut ChaCha8Rng::seed_from_u64(0)).unwrap()));

    let [x, y] = cfg.start;
    let uav = Config::aerial(x, y, cfg.takeoff_altitude, 0.0);
    let ugv = Config::ground(x, y, sc.world.ground_height(x, y));
    c.bench_function("expand_layers_from_empty", |b| {
        b.iter_batched(
            Roadmap::new,
            |mut g| {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                expand_layers(&mut g, &out.map, &sc.world, &uav, Some(&ugv), &cfg.sampling, &cfg.bodies, &mut rng)
            },
            BatchSize::SmallInput,
        )
    });
}

fn missions(c: &mut Criterion) {
    let sc = scenario("env3_open", &[]);
    let mut group = c.benchmark_group("mission");
    group.sample_size(10);
    for s in Strategy::ALL {
        group.bench_function(s.as_str(), |b| b.iter(|| run(&sc.config(s, 0), &sc.world).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sensing, planning, missions);
criterion_main!(benches);
