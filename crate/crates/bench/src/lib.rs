//! Shared fixtures for the criterion benches: shipped scenarios and a mid-mission snapshot.

use std::path::PathBuf;

use rx_core::mission::{run, MissionOutcome, Strategy};
use rx_core::scenario::{parse_param, Scenario};

/// Loads a scenario shipped in the workspace `scenarios/` directory.
pub fn scenario(name: &str, overrides: &[&str]) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"));
    let ov: Vec<(String, String)> = overrides.iter().map(|s| parse_param(s).expect("override")).collect();
    Scenario::load_with(&path, &ov).expect("shipped scenario loads")
}

/// Proposed-strategy mission on `name` stopped at `coverage` (seed 0); its map is partly
/// known and its roadmap populated.
pub fn snapshot(name: &str, coverage: f64) -> (Scenario, MissionOutcome) {
    let sc = scenario(name, &[&format!("coverage_target={coverage}")]);
    let out = run(&sc.config(Strategy::Proposed, 0), &sc.world).expect("mission runs");
    (sc, out)
}
