//! Problem generators, ground truth, heuristics and regret.

mod bo;
mod grid;
mod height;
mod heuristics;
mod regret;
mod sampling;

pub use bo::{sample_gp_world, BoEnv, BoWorld};
pub use grid::{sample_grid_world, transition_graph, GridMdpWorld, GridOptions, TransitionEnv};
pub use height::{load_heightmap, parse_heightmap, HeightWorld};
pub use heuristics::{EdgeCost, GoalDistanceHeuristic, PathHeuristic};
pub use regret::{epsilon_safe_regret, RegretSeries};
pub use sampling::{sample_gp_values, seeded_rng};

pub use crate::graph::min_cost_path;
