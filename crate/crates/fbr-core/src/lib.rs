//! Restore biconnectivity of a multi-robot communication network while
//! minimizing the maximum robot displacement.
//!
//! The input is a set of robot positions whose disk communication graph is
//! connected but not biconnected (a single failure can still split it). The
//! solvers compute new positions whose communication graph is biconnected:
//!
//! * [`augment`] picks a minimum-bottleneck set of new edges that biconnects
//!   the graph (block-cut tree superimposition + bottleneck arborescence).
//! * [`relocate`] realizes those edges: a sequential cascaded-relocation
//!   heuristic and an optimal convex solver (bisection over the displacement
//!   radius with cyclic projections).
//! * [`baselines`] reimplements two competing approaches, block translation
//!   and single cascaded relocation, for comparison.
//! * [`verify`] checks solutions independently of the solvers and provides a
//!   small-instance exact oracle.
//! * [`instance`], [`bench`], and [`render`] cover dataset generation,
//!   benchmark orchestration, and SVG output for the `fbr` CLI.

pub mod augment;
pub mod baselines;
pub mod bench;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod instance;
pub mod relocate;
pub mod render;
pub mod verify;

pub use error::{FbrError, Result};
pub use geometry::{edge_weight, Point, RobotConfig, TAU_GEO};
pub use graph::{
    articulation_points, block_cut_tree, comm_graph, is_biconnected, is_connected, repair_graph,
    BlockCutTree, CommGraph, RepairGraph,
};
