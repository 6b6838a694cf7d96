//! Gaussian-process machinery consumed by the safety reasoning.

mod bounds;
mod kernel;
mod posterior;

pub use bounds::{BetaSchedule, ConfidenceState};
pub use kernel::{KernelFamily, KernelSpec};
pub use posterior::{gamma_estimate, GraphPosterior, ObservationLog, PosteriorModel};
