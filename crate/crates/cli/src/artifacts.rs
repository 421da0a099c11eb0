use std::path::{Path, PathBuf};

use rx_core::grid_map::world_file::WorldDoc;
use rx_core::mission::{write_log_csv, MissionOutcome, SeriesPoint, Summary};
use serde::{Deserialize, Serialize};

use crate::{create_dir, read_file, write_file, CliError, Result};

pub const LOG_CSV: &str = "log.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const FINAL_MAP: &str = "final_map.toml";
pub const ROADMAP_JSON: &str = "roadmap.json";
pub const SERIES_CSV: &str = "coverage_series.csv";

pub const ALL: [&str; 5] = [LOG_CSV, SUMMARY_JSON, FINAL_MAP, ROADMAP_JSON, SERIES_CSV];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t_total: f64,
    pub t_exploration: f64,
    pub coverage: f64,
}

/// Coverage against total and pure-exploration mission time, one row per mapping event.
pub fn series_csv(series: &[SeriesPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if series.is_empty() {
        w.write_record(["t_total", "t_exploration", "coverage"]).expect("in-memory write");
    }
    for p in series {
        w.serialize(SeriesRow { t_total: p.t_total, t_exploration: p.t_exploration, coverage: p.coverage })
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn load_series_csv(text: &str) -> Result<Vec<SeriesRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<SeriesRow>, _>>()
        .map_err(|e| CliError::Core(rx_core::Error::Parse { what: "coverage series".into(), message: e.to_string() }))
}

/// Writes the five run artifacts into `dir` and returns their paths.
pub fn write_run(dir: &Path, outcome: &MissionOutcome, ground_height: f64) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let roadmap = serde_json::to_string_pretty(&outcome.roadmap.export()).expect("roadmap serializes");
    let contents = [
        write_log_csv(&outcome.log),
        Summary::from_log(&outcome.log).to_json(),
        WorldDoc::snapshot(&outcome.map, ground_height).to_toml(),
        roadmap,
        series_csv(&outcome.log.series),
    ];
    let mut paths = Vec::new();
    for (name, text) in ALL.iter().zip(contents) {
        let p = dir.join(name);
        write_file(&p, &text)?;
        paths.push(p);
    }
    Ok(paths)
}

pub fn load_summary(dir: &Path) -> Result<Summary> {
    let p = dir.join(SUMMARY_JSON);
    let text = read_file(&p)?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Core(rx_core::Error::Parse { what: p.display().to_string(), message: e.to_string() })
    })
}
