//! Energy-aware collaborative UAV–UGV exploration.
//!
//! The crate is layered bottom-up:
//!
//! - [`grid_map`]: ground-truth voxel worlds, occupancy maps, simulated scans and
//!   information gain;
//! - [`frontier`]: slice-based frontier circles that steer roadmap growth;
//! - [`roadmap`]: the incremental dual-layer roadmap with rendezvous edges;
//! - [`op_solver`]: budgeted orienteering tours (heuristic plus exact enumeration);
//! - [`coordination`]: collect-pair selection and coupled tour planning;
//! - [`mission`]: the tour loop with recharging, and the UAV-only and sequential baselines.

// `!(x > 0.0)` guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coordination;
pub mod error;
pub mod frontier;
pub mod geometry;
pub mod graph;
pub mod grid_map;
pub mod mission;
pub mod op_solver;
pub mod roadmap;
pub mod scenario;
pub mod work;

pub use error::{Error, Result};
pub use geometry::Vec3;
pub use grid_map::{
    coverage_fraction, Config, Dims, Grid, Layer, Occupancy, SensorModel, VoxelMap, WorldModel,
};
pub use roadmap::NodeId;
