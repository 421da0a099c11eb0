use serde::{Deserialize, Serialize};

use super::{Attribution, MissionLog, RegionAttribution, StopReason, Strategy};
use crate::error::{Error, Result};

/// One line of the per-tour log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub tour: usize,
    pub t_exploration_cum: f64,
    pub t_total_cum: f64,
    pub coverage: f64,
    pub tau_a: f64,
    pub tau_g: f64,
    pub fallback: bool,
    pub compute_ms: f64,
}

/// Serializes the tour log as CSV with a header row. Floats round-trip exactly.
pub fn write_log_csv(log: &MissionLog) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for t in &log.tours {
        w.serialize(LogRow {
            tour: t.tour,
            t_exploration_cum: t.t_exploration_cum,
            t_total_cum: t.t_total_cum,
            coverage: t.coverage,
            tau_a: t.tau_a,
            tau_g: t.tau_g,
            fallback: t.fallback,
            compute_ms: t.compute_ms,
        })
        .expect("in-memory CSV write");
    }
    if log.tours.is_empty() {
        w.write_record(["tour", "t_exploration_cum", "t_total_cum", "coverage", "tau_a", "tau_g", "fallback", "compute_ms"])
            .expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("CSV is UTF-8")
}

pub fn load_log_csv(text: &str) -> Result<Vec<LogRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<LogRow>, _>>()
        .map_err(|e| Error::Parse { what: "log csv".into(), message: e.to_string() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub strategy: Strategy,
    pub seed: u64,
    #[serde(rename = "N_tours")]
    pub n_tours: usize,
    pub t80: Option<f64>,
    pub t95: Option<f64>,
    pub final_coverage: f64,
    pub t_exploration: f64,
    pub t_total: f64,
    pub compute_ms_total: f64,
    pub fallback_tours: usize,
    pub stop_reason: StopReason,
    pub attribution: Attribution,
    pub regions: Vec<RegionAttribution>,
}

impl Summary {
    pub fn from_log(log: &MissionLog) -> Self {
        let last = log.tours.last();
        Self {
            strategy: log.strategy,
            seed: log.seed,
            n_tours: log.n_tours,
            t80: log.t80,
            t95: log.t95,
            final_coverage: log.final_coverage,
            t_exploration: last.map_or(0.0, |t| t.t_exploration_cum),
            t_total: last.map_or(0.0, |t| t.t_total_cum),
            compute_ms_total: log.tours.iter().fold(0.0, |acc, t| acc + t.compute_ms),
            fallback_tours: log.tours.iter().filter(|t| t.fallback).count(),
            stop_reason: log.stop_reason,
            attribution: log.attribution.clone(),
            regions: log.regions.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}
