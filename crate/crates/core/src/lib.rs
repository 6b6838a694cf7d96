//! Goal-oriented safe exploration over decision graphs.
//!
//! The crate wraps an arbitrary (unsafe) interactive-learning oracle and only
//! ever evaluates decisions whose safety is certified by Gaussian-process
//! confidence bounds on an unknown constraint `q(x) >= 0`.
//!
//! Layout:
//! * [`gp`] kernels, posterior inference and monotone confidence bounds.
//! * [`graph`] the decision graph and the set calculus (reachability,
//!   ergodicity, pessimistic/optimistic expansion, ground-truth baselines).
//! * [`engine`] the goal-oriented exploration loop and the safe expansion step.
//! * [`oracles`] GP-UCB, fixed-goal and full-exploration oracles plus the
//!   SafeOpt/StageOpt/SMDP comparison algorithms.
//! * [`worlds`] problem generators, shortest paths, heuristics and regret.
//! * [`harness`] seeded experiments, configuration files and CSV reports.

pub mod engine;
pub mod error;
pub mod gp;
pub mod graph;
pub mod harness;
pub mod oracles;
pub mod par;
pub mod worlds;

pub use error::{GooseError, Result};
