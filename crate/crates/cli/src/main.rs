use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rx_cli::benchmark::{run_benchmark, BenchmarkSpec, AGGREGATE_CSV};
use rx_cli::{artifacts, oracle, read_file, CliError};
use rx_core::mission::{run, Strategy, Summary};
use rx_core::op_solver::OpInstance;
use rx_core::scenario::{parse_param, Scenario};

#[derive(Parser)]
#[command(name = "rx", version, about = "Collaborative UAV-UGV exploration missions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one mission and write its artifacts.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "proposed")]
        strategy: Strategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Scenario override `key=value`; bare keys address the mission table.
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, String)>,
    },
    /// Run scenarios x strategies x seeds and aggregate the results.
    Benchmark {
        #[arg(long, required = true, num_args = 1..)]
        scenario: Vec<PathBuf>,
        /// Defaults to all three strategies.
        #[arg(long, num_args = 1..)]
        strategy: Vec<Strategy>,
        /// Defaults to seeds 0 to 4.
        #[arg(long, num_args = 1..)]
        seed: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, String)>,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Compare the orienteering heuristic against exhaustive enumeration.
    Oracle {
        /// Instance file (TOML).
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Parse and check a scenario without running it.
    ValidateScenario {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, String)>,
    },
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    parse_param(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RX_LOG_LEVEL", "warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Run { scenario, strategy, seed, out, params } => {
            let sc = Scenario::load_with(&scenario, &params)?;
            let outcome = run(&sc.config(strategy, seed), &sc.world)?;
            let paths = artifacts::write_run(&out, &outcome, sc.world_doc.ground_height)?;
            let s = Summary::from_log(&outcome.log);
            println!(
                "{} {strategy} seed {seed}: coverage {:.4}, {} tours, t80 {}, t95 {}, stop {:?}",
                sc.name,
                s.final_coverage,
                s.n_tours,
                fmt_time(s.t80),
                fmt_time(s.t95),
                s.stop_reason
            );
            for p in paths {
                println!("  wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Benchmark { scenario, strategy, seed, out, params, jobs } => {
            let spec = BenchmarkSpec {
                scenarios: scenario,
                strategies: if strategy.is_empty() { Strategy::ALL.to_vec() } else { strategy },
                seeds: if seed.is_empty() { (0..5).collect() } else { seed },
                out,
                overrides: params,
                jobs,
            };
            let report = run_benchmark(&spec)?;
            print!("{}", rx_cli::benchmark::render_table(&report.aggregate));
            let failed: Vec<_> = report.entries.iter().filter(|e| !e.error.is_empty()).collect();
            for e in &failed {
                eprintln!("failed {}: {}", e.dir, e.error);
            }
            println!("aggregate written to {}", spec.out.join(AGGREGATE_CSV).display());
            Ok(if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Oracle { instance, seed } => {
            let text = read_file(&instance)?;
            let inst = OpInstance::from_toml(&text).map_err(|e| match e {
                rx_core::Error::Parse { message, .. } => {
                    rx_core::Error::Parse { what: instance.display().to_string(), message }
                }
                other => other,
            })?;
            let report = oracle::compare(&inst, seed)?;
            print!("{}", report.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::ValidateScenario { scenario, params } => {
            let sc = Scenario::load_with(&scenario, &params)?;
            sc.validate()?;
            let d = sc.world.dims();
            println!(
                "{}: {} x {} x {} voxels at {} m, {} reachable, {} named regions",
                sc.name,
                d.nx,
                d.ny,
                d.nz,
                sc.world.grid().resolution,
                sc.world.reachable_count(),
                sc.world.regions().len()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn fmt_time(t: Option<f64>) -> String {
    t.map_or("-".into(), |t| format!("{t:.1} s"))
}
