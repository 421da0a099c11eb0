use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rx_cli::artifacts::{self, load_series_csv};
use rx_cli::benchmark::{aggregate_dir, run_benchmark, BenchmarkSpec, AggregateRow, AGGREGATE_CSV, AGGREGATE_TXT};
use rx_cli::stats::mean_std;
use rx_core::mission::{load_log_csv, Strategy};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scenario(name: &str) -> PathBuf {
    root().join("scenarios").join(format!("{name}.toml"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn rx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rx")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_five_artifacts_and_repeats_byte_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = scenario("env3_open");
    let mut logs = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("r{k}"));
        let o = rx(&["run", "--scenario", s(&sc), "--strategy", "proposed", "--seed", "3", "--out", s(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        for name in artifacts::ALL {
            assert!(out.join(name).is_file(), "missing {name}");
        }
        logs.push((
            std::fs::read(out.join(artifacts::LOG_CSV)).unwrap(),
            std::fs::read(out.join(artifacts::SERIES_CSV)).unwrap(),
        ));
    }
    assert_eq!(logs[0], logs[1]);
    let series = load_series_csv(std::str::from_utf8(&logs[0].1).unwrap()).unwrap();
    assert!(series.windows(2).all(|w| w[0].coverage <= w[1].coverage && w[0].t_total <= w[1].t_total));
    assert_eq!(artifacts::series_csv(&series.iter().map(|r| rx_core::mission::SeriesPoint {
        t_total: r.t_total,
        t_exploration: r.t_exploration,
        coverage: r.coverage,
    }).collect::<Vec<_>>()).as_bytes(), logs[0].1.as_slice());
}

#[test]
fn unknown_strategy_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = rx(&["run", "--scenario", s(&scenario("env3_open")), "--strategy", "greedy", "--out", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown strategy"));
}

#[test]
fn parse_errors_name_the_file_and_location() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "name = \"bad\"\n[world]\ndims = [10, 10\n").unwrap();
    let o = rx(&["validate-scenario", "--scenario", s(&bad)]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.toml") && err.contains("line 3"), "{err}");
}

#[test]
fn shipped_scenarios_validate() {
    for name in ["env1_tunnel_scaffold", "env2_cluttered", "env3_open"] {
        let o = rx(&["validate-scenario", "--scenario", s(&scenario(name))]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn oracle_reports_gap_and_infeasibility() {
    let out = |f: &str| {
        let o = rx(&["oracle", "--instance", s(&fixture(f))]);
        (o.status.success(), String::from_utf8_lossy(&o.stdout).into_owned(), String::from_utf8_lossy(&o.stderr).into_owned())
    };
    let (ok, text, _) = out("grid6.toml");
    assert!(ok);
    assert!(text.contains("optimum: reward 20") && text.contains("gap: 0.00%"), "{text}");
    let (ok, text, _) = out("infeasible.toml");
    assert!(ok);
    assert!(text.contains("optimum: infeasible") && text.contains("heuristic: infeasible"), "{text}");
    let (ok, text, _) = out("zero_reward.toml");
    assert!(ok);
    assert!(text.contains("optimum: reward 0 "), "{text}");
    let (ok, _, err) = out("too_large.toml");
    assert!(!ok);
    assert!(err.contains("brute-force limit"), "{err}");
}

fn first_reaching(series: &[rx_cli::artifacts::SeriesRow], level: f64) -> Option<f64> {
    series.iter().find(|p| p.coverage >= level).map(|p| p.t_exploration)
}

#[test]
fn benchmark_aggregate_is_recomputable_from_run_files() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = BenchmarkSpec {
        scenarios: vec![scenario("env3_open")],
        strategies: Strategy::ALL.to_vec(),
        seeds: (0..5).collect(),
        out: tmp.path().to_path_buf(),
        overrides: vec![],
        jobs: 0,
    };
    let report = run_benchmark(&spec).unwrap();
    assert_eq!(report.entries.len(), 15);
    assert!(report.entries.iter().all(|e| e.error.is_empty()));
    for e in &report.entries {
        for name in artifacts::ALL {
            assert!(tmp.path().join(&e.dir).join(name).is_file());
        }
    }
    assert!(tmp.path().join(AGGREGATE_CSV).is_file() && tmp.path().join(AGGREGATE_TXT).is_file());
    assert_eq!(report.aggregate.len(), 3);
    assert_eq!(aggregate_dir(tmp.path()).unwrap(), report.aggregate);

    let text = std::fs::read_to_string(tmp.path().join(AGGREGATE_CSV)).unwrap();
    let rows: Vec<AggregateRow> = csv::Reader::from_reader(text.as_bytes()).deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows, report.aggregate);

    // Hand recomputation from the per-run CSV files.
    for row in &rows {
        let dirs: Vec<PathBuf> = report
            .entries
            .iter()
            .filter(|e| e.strategy == row.strategy)
            .map(|e| tmp.path().join(&e.dir))
            .collect();
        let read = |d: &Path, f: &str| std::fs::read_to_string(d.join(f)).unwrap();
        let cov: Vec<f64> = dirs.iter().map(|d| load_log_csv(&read(d, artifacts::LOG_CSV)).unwrap().last().unwrap().coverage).collect();
        let t95: Vec<f64> = dirs
            .iter()
            .filter_map(|d| first_reaching(&load_series_csv(&read(d, artifacts::SERIES_CSV)).unwrap(), 0.95))
            .collect();
        let (cm, cs) = mean_std(&cov).unwrap();
        assert!((cm - row.coverage_mean.unwrap()).abs() < 1e-12);
        assert!((cs - row.coverage_std.unwrap()).abs() < 1e-12);
        assert_eq!(t95.len(), row.t95_reached);
        if let Some((m, sd)) = mean_std(&t95) {
            assert!((m - row.t95_mean.unwrap()).abs() < 1e-9);
            assert!((sd - row.t95_std.unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn single_seed_cells_have_zero_spread() {
    let tmp = tempfile::tempdir().unwrap();
    let o = rx(&[
        "benchmark", "--scenario", s(&scenario("env3_open")), "--strategy", "proposed", "--seed", "2", "--out", s(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = aggregate_dir(tmp.path()).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!((r.runs, r.failed), (1, 0));
    assert_eq!(r.n_tours_std, Some(0.0));
    assert_eq!(r.coverage_std, Some(0.0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("± 0.0"));
}

#[test]
fn benchmark_rejects_repeated_seeds() {
    let tmp = tempfile::tempdir().unwrap();
    let o = rx(&["benchmark", "--scenario", s(&scenario("env3_open")), "--seed", "1", "1", "--out", s(tmp.path())]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("distinct"));
}
