use crate::engine::RunTrace;
use crate::error::{GooseError, Result};
use crate::graph::{baseline_sets, BaselineRule};

use super::BoWorld;

/// Per-evaluation regret and its running average.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegretSeries {
    pub instant: Vec<f64>,
    pub running_average: Vec<f64>,
    /// Best objective value inside the ε-reachable region.
    pub optimum: f64,
}

/// ε-safe regret of every evaluation in `trace` (constraint and objective
/// evaluations alike), measured against the best objective value inside the
/// ground-truth region reachable at accuracy `eps`. Values are clamped at
/// zero since a run may certify nodes slightly outside that region.
pub fn epsilon_safe_regret(world: &BoWorld, trace: &RunTrace, eps: f64) -> Result<RegretSeries> {
    let region = baseline_sets(&world.graph, &world.true_q, &world.seed, BaselineRule::Direct, eps)?;
    let optimum = region
        .iter()
        .map(|x| world.true_f[x])
        .fold(f64::NEG_INFINITY, f64::max);
    if !optimum.is_finite() {
        return Err(GooseError::invalid("empty reachable region"));
    }
    let mut series = RegretSeries {
        optimum,
        ..RegretSeries::default()
    };
    let mut total = 0.0;
    for (i, e) in trace.evaluations.iter().enumerate() {
        let r = (optimum - world.true_f[e.node]).max(0.0);
        total += r;
        series.instant.push(r);
        series.running_average.push(total / (i + 1) as f64);
    }
    Ok(series)
}
