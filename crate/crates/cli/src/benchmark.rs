use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rx_core::mission::{run, Strategy, Summary};
use rx_core::scenario::Scenario;
use serde::{Deserialize, Serialize};

use crate::artifacts::{load_summary, write_run};
use crate::stats::{format_mean_std, mean_std};
use crate::{create_dir, read_file, write_file, CliError, Result};

pub const RUNS_CSV: &str = "runs.csv";
pub const AGGREGATE_CSV: &str = "aggregate.csv";
pub const AGGREGATE_TXT: &str = "aggregate.txt";

#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub scenarios: Vec<PathBuf>,
    pub strategies: Vec<Strategy>,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    /// `key=value` scenario overrides applied to every scenario.
    pub overrides: Vec<(String, String)>,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() || self.strategies.is_empty() || self.seeds.is_empty() {
            return Err(CliError::Usage("benchmark needs at least one scenario, strategy and seed".into()));
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return Err(CliError::Usage("benchmark seeds must be distinct".into()));
        }
        Ok(())
    }
}

/// One line of the run index. `error` is empty for completed runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub scenario: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub dir: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scenario: String,
    pub strategy: Strategy,
    pub runs: usize,
    pub failed: usize,
    pub t80_mean: Option<f64>,
    pub t80_std: Option<f64>,
    /// Runs that reached 80 % coverage; the t80 statistics cover only these.
    pub t80_reached: usize,
    pub t95_mean: Option<f64>,
    pub t95_std: Option<f64>,
    pub t95_reached: usize,
    pub n_tours_mean: Option<f64>,
    pub n_tours_std: Option<f64>,
    pub coverage_mean: Option<f64>,
    pub coverage_std: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub entries: Vec<RunEntry>,
    pub aggregate: Vec<AggregateRow>,
}

fn run_dir(scenario: &str, strategy: Strategy, seed: u64) -> String {
    format!("{scenario}/{strategy}/seed_{seed}")
}

/// Runs the full cross product in a worker pool, writes per-run artifacts, the run index
/// and the aggregate. Failed runs are indexed with their error and left out of the
/// statistics.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkReport> {
    spec.validate()?;
    create_dir(&spec.out)?;
    let scenarios = spec
        .scenarios
        .iter()
        .map(|p| Scenario::load_with(p, &spec.overrides))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut names = BTreeSet::new();
    for s in &scenarios {
        if !names.insert(s.name.clone()) {
            return Err(CliError::Usage(format!("scenario name `{}` appears twice", s.name)));
        }
    }
    let cells: Vec<(usize, Strategy, u64)> = (0..scenarios.len())
        .flat_map(|i| spec.strategies.iter().flat_map(move |&s| spec.seeds.iter().map(move |&k| (i, s, k))))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let entries: Vec<RunEntry> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, strategy, seed)| {
                let sc = &scenarios[i];
                let dir = run_dir(&sc.name, strategy, seed);
                let result = run(&sc.config(strategy, seed), &sc.world)
                    .map_err(CliError::from)
                    .and_then(|out| write_run(&spec.out.join(&dir), &out, sc.world_doc.ground_height));
                let error = match result {
                    Ok(_) => String::new(),
                    Err(e) => {
                        log::warn!("{dir}: {e}");
                        e.to_string()
                    }
                };
                RunEntry { scenario: sc.name.clone(), strategy, seed, dir, error }
            })
            .collect()
    });

    write_file(&spec.out.join(RUNS_CSV), &to_csv(&entries))?;
    let aggregate = aggregate_dir(&spec.out)?;
    write_file(&spec.out.join(AGGREGATE_CSV), &to_csv(&aggregate))?;
    write_file(&spec.out.join(AGGREGATE_TXT), &render_table(&aggregate))?;
    Ok(BenchmarkReport { entries, aggregate })
}

/// Recomputes the aggregate from the run index and per-run summaries under `out`.
pub fn aggregate_dir(out: &Path) -> Result<Vec<AggregateRow>> {
    let index = read_file(&out.join(RUNS_CSV))?;
    let entries: Vec<RunEntry> = csv::Reader::from_reader(index.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CliError::Core(rx_core::Error::Parse { what: RUNS_CSV.into(), message: e.to_string() }))?;
    let mut runs = Vec::new();
    for e in entries {
        let summary = if e.error.is_empty() { Some(load_summary(&out.join(&e.dir))?) } else { None };
        runs.push((e, summary));
    }
    Ok(aggregate(&runs))
}

/// Groups runs by (scenario, strategy) in first-seen order.
pub fn aggregate(runs: &[(RunEntry, Option<Summary>)]) -> Vec<AggregateRow> {
    let mut keys: Vec<(String, Strategy)> = Vec::new();
    for (e, _) in runs {
        let k = (e.scenario.clone(), e.strategy);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(scenario, strategy)| {
            let cell: Vec<&(RunEntry, Option<Summary>)> =
                runs.iter().filter(|(e, _)| e.scenario == scenario && e.strategy == strategy).collect();
            let ok: Vec<&Summary> = cell.iter().filter_map(|(_, s)| s.as_ref()).collect();
            let t80: Vec<f64> = ok.iter().filter_map(|s| s.t80).collect();
            let t95: Vec<f64> = ok.iter().filter_map(|s| s.t95).collect();
            let tours: Vec<f64> = ok.iter().map(|s| s.n_tours as f64).collect();
            let cov: Vec<f64> = ok.iter().map(|s| s.final_coverage).collect();
            let (t80_mean, t80_std) = split(mean_std(&t80));
            let (t95_mean, t95_std) = split(mean_std(&t95));
            let (n_tours_mean, n_tours_std) = split(mean_std(&tours));
            let (coverage_mean, coverage_std) = split(mean_std(&cov));
            AggregateRow {
                scenario,
                strategy,
                runs: cell.len(),
                failed: cell.len() - ok.len(),
                t80_mean,
                t80_std,
                t80_reached: t80.len(),
                t95_mean,
                t95_std,
                t95_reached: t95.len(),
                n_tours_mean,
                n_tours_std,
                coverage_mean,
                coverage_std,
            }
        })
        .collect()
}

fn split(v: Option<(f64, f64)>) -> (Option<f64>, Option<f64>) {
    (v.map(|p| p.0), v.map(|p| p.1))
}

fn pair(m: Option<f64>, s: Option<f64>) -> Option<(f64, f64)> {
    m.zip(s)
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Aligned text table; times in seconds, coverage as a percentage.
pub fn render_table(rows: &[AggregateRow]) -> String {
    let header = ["scenario", "strategy", "runs", "failed", "t80 [s]", "t95 [s]", "N_tours", "coverage [%]"];
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in rows {
        let pct = pair(r.coverage_mean, r.coverage_std).map(|(m, s)| (100.0 * m, 100.0 * s));
        table.push(vec![
            r.scenario.clone(),
            r.strategy.to_string(),
            r.runs.to_string(),
            r.failed.to_string(),
            with_count(format_mean_std(pair(r.t80_mean, r.t80_std), 1), r.t80_reached, r.runs - r.failed),
            with_count(format_mean_std(pair(r.t95_mean, r.t95_std), 1), r.t95_reached, r.runs - r.failed),
            format_mean_std(pair(r.n_tours_mean, r.n_tours_std), 1),
            format_mean_std(pct, 2),
        ]);
    }
    let widths: Vec<usize> =
        (0..header.len()).map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (i, row) in table.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell}{}", " ".repeat(w - cell.chars().count())))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            out.push_str(&rule.join("  "));
            out.push('\n');
        }
    }
    out
}

/// Marks statistics computed over a subset of the completed runs.
fn with_count(cell: String, reached: usize, completed: usize) -> String {
    if reached == completed {
        cell
    } else {
        format!("{cell} ({reached}/{completed})")
    }
}
