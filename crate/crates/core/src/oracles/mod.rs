//! Concrete oracles and the safe comparison algorithms.

mod baselines;

pub use baselines::{run_baseline, safeopt_step, smdp_runner, stageopt_step, BaselineKind, BaselineStep};

use crate::engine::{Oracle, OracleContext};
use crate::error::{GooseError, Result};
use crate::gp::{BetaSchedule, GraphPosterior};
use crate::graph::NodeSet;

/// Argmax of `mean + scale * sd` over `domain`, ties to the lowest index.
pub fn ucb_suggest(means: &[f64], variances: &[f64], scale: f64, domain: &NodeSet) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for x in domain.iter() {
        let v = means[x] + scale * variances[x].max(0.0).sqrt();
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((x, v));
        }
    }
    best.map(|(x, _)| x)
        .ok_or_else(|| GooseError::invalid("UCB over an empty domain"))
}

/// GP-UCB over the supplied domain.
///
/// Without its own model the oracle reads the constraint posterior from the
/// context, which is the right thing when objective and constraint coincide.
#[derive(Clone, Debug)]
pub struct UcbOracle {
    model: Option<GraphPosterior>,
    beta: BetaSchedule,
}

impl UcbOracle {
    /// Shares the constraint model.
    pub fn shared(beta: BetaSchedule) -> Self {
        Self { model: None, beta }
    }

    /// Keeps a separate objective model updated through `notify`.
    pub fn with_model(model: GraphPosterior, beta: BetaSchedule) -> Self {
        Self {
            model: Some(model),
            beta,
        }
    }
}

impl Oracle for UcbOracle {
    fn suggest(&mut self, domain: &NodeSet, ctx: &OracleContext<'_>) -> Result<Option<usize>> {
        let pick = match &self.model {
            Some(m) => {
                let scale = self.beta.scale(m.observation_count() + 1, m.gamma_estimate());
                ucb_suggest(m.means(), m.variances(), scale, domain)?
            }
            None => {
                let scale = self.beta.scale(ctx.observation_count + 1, ctx.gamma);
                ucb_suggest(ctx.means, ctx.variances, scale, domain)?
            }
        };
        Ok(Some(pick))
    }

    fn notify(&mut self, node: usize, value: Option<f64>) {
        if let (Some(m), Some(y)) = (self.model.as_mut(), value) {
            if let Err(e) = m.observe(node, y) {
                log::warn!("objective model rejected observation at {node}: {e}");
            }
        }
    }
}

/// Always asks for one fixed goal until it has been evaluated.
#[derive(Clone, Debug)]
pub struct GoalOracle {
    goal: usize,
    reached: bool,
}

impl GoalOracle {
    pub fn new(goal: usize) -> Self {
        Self { goal, reached: false }
    }
}

impl Oracle for GoalOracle {
    fn suggest(&mut self, domain: &NodeSet, _ctx: &OracleContext<'_>) -> Result<Option<usize>> {
        if self.reached {
            Ok(None)
        } else if domain.contains(self.goal) {
            Ok(Some(self.goal))
        } else {
            Err(GooseError::GoalUnreachable(self.goal))
        }
    }

    fn notify(&mut self, node: usize, _value: Option<f64>) {
        if node == self.goal {
            self.reached = true;
        }
    }
}

/// Proposes any optimistic node that is not yet safe (lowest index first),
/// so the loop keeps expanding until nothing uncertain is left.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullExplorationOracle;

impl Oracle for FullExplorationOracle {
    fn suggest(&mut self, domain: &NodeSet, ctx: &OracleContext<'_>) -> Result<Option<usize>> {
        Ok(domain.iter().find(|&x| !ctx.pess.contains(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::KernelSpec;
    use crate::graph::DecisionGraph;

    fn ctx<'a>(g: &'a DecisionGraph, pess: &'a NodeSet, m: &'a [f64], v: &'a [f64]) -> OracleContext<'a> {
        OracleContext {
            graph: g,
            pess,
            means: m,
            variances: v,
            observation_count: 0,
            gamma: 0.0,
        }
    }

    #[test]
    fn ucb_ties_and_singletons() {
        let d = NodeSet::full(4);
        assert_eq!(ucb_suggest(&[0.0; 4], &[1.0; 4], 3.0, &d).unwrap(), 0);
        assert_eq!(ucb_suggest(&[0.0, 5.0, 0.0, 0.0], &[1.0; 4], 3.0, &NodeSet::from_indices(4, [2])).unwrap(), 2);
        assert!(ucb_suggest(&[0.0; 4], &[1.0; 4], 3.0, &NodeSet::new(4)).is_err());
    }

    #[test]
    fn ucb_follows_high_observation() {
        let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let k = KernelSpec::rbf(0.05, 1.0).unwrap();
        let mut m = GraphPosterior::new(k, 0.01, 0.0, 1, xs).unwrap();
        m.observe(7, 2.0).unwrap();
        let mut o = UcbOracle::with_model(m, BetaSchedule::Constant(0.5));
        let g = DecisionGraph::chain(21, 0.1).unwrap();
        let pess = NodeSet::new(21);
        let (mm, vv) = (vec![0.0; 21], vec![1.0; 21]);
        assert_eq!(o.suggest(&NodeSet::full(21), &ctx(&g, &pess, &mm, &vv)).unwrap(), Some(7));
    }

    #[test]
    fn goal_oracle_lifecycle() {
        let g = DecisionGraph::chain(3, 1.0).unwrap();
        let pess = NodeSet::new(3);
        let (m, v) = (vec![0.0; 3], vec![1.0; 3]);
        let mut o = GoalOracle::new(2);
        assert_eq!(o.suggest(&NodeSet::full(3), &ctx(&g, &pess, &m, &v)).unwrap(), Some(2));
        assert!(matches!(
            o.suggest(&NodeSet::from_indices(3, [0]), &ctx(&g, &pess, &m, &v)),
            Err(GooseError::GoalUnreachable(2))
        ));
        o.notify(2, None);
        assert_eq!(o.suggest(&NodeSet::full(3), &ctx(&g, &pess, &m, &v)).unwrap(), None);
    }

    #[test]
    fn full_exploration_skips_safe_nodes() {
        let g = DecisionGraph::chain(3, 1.0).unwrap();
        let pess = NodeSet::from_indices(3, [0, 1]);
        let (m, v) = (vec![0.0; 3], vec![1.0; 3]);
        let mut o = FullExplorationOracle;
        assert_eq!(o.suggest(&NodeSet::full(3), &ctx(&g, &pess, &m, &v)).unwrap(), Some(2));
        assert_eq!(o.suggest(&pess, &ctx(&g, &pess, &m, &v)).unwrap(), None);
    }
}
