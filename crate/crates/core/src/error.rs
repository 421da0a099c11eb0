use thiserror::Error;

use crate::roadmap::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration at ({x:.3}, {y:.3}, {z:.3}) lies outside the grid")]
    InvalidConfig { x: f64, y: f64, z: f64 },
    #[error("map and world shapes differ: {map:?} vs {world:?}")]
    ShapeError { map: [usize; 3], world: [usize; 3] },
    #[error("sensor has no yaw set; use info_gain for omnidirectional sensors")]
    NotDirectional,
    #[error("no frontier circles to sample from")]
    NoFrontiers,
    #[error("no path between nodes {from} and {to}")]
    NoPath { from: NodeId, to: NodeId },
    #[error("node {0} does not belong to the requested layer")]
    WrongLayer(NodeId),
    #[error("orienteering instance is malformed: {0}")]
    MalformedInstance(String),
    #[error("shortest start-to-end path ({shortest:.3} m) exceeds the budget of {budget:.3} m")]
    Infeasible { shortest: f64, budget: f64 },
    #[error("instance has {nodes} nodes, exceeding the brute-force limit of {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error("release pair is not present in the roadmap: {0}")]
    InvalidRelease(String),
    #[error("plan references node {0} which is not in the roadmap")]
    StalePlan(NodeId),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },
}
