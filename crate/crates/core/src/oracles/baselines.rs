use super::{ucb_suggest, FullExplorationOracle};
use crate::engine::{
    expander_set, run, uncertain_targets, Environment, EvalKind, GooseConfig, ModelSpec, RunTrace, Session, Uninformative,
};
use crate::error::{GooseError, Result};
use crate::gp::ConfidenceState;
use crate::graph::{Classifier, DecisionGraph, NodeSet, SafeSetState};

/// Decision of one baseline step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineStep {
    Evaluate(usize),
    /// Every candidate is known to accuracy `eps`; the node carries the
    /// current best guess (largest lower bound).
    Converged(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineKind {
    SafeOpt,
    /// Expansion while `t <= t1`, safe UCB afterwards.
    StageOpt { t1: usize },
}

fn argmax_by<F: Fn(usize) -> f64>(set: impl Iterator<Item = usize>, score: F) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for x in set {
        let v = score(x);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((x, v));
        }
    }
    best
}

fn best_lower(bounds: &ConfidenceState, pess: &NodeSet) -> Result<(usize, f64)> {
    argmax_by(pess.iter(), |x| bounds.lower()[x]).ok_or_else(|| GooseError::invalid("empty safe set"))
}

/// Widest node among potential maximizers and expanders inside the safe set.
pub fn safeopt_step(g: &DecisionGraph, c: &Classifier, bounds: &ConfidenceState, sets: &SafeSetState) -> Result<BaselineStep> {
    let (best, lmax) = best_lower(bounds, &sets.pess)?;
    let mut candidates: NodeSet = sets.pess.iter().filter(|&x| bounds.upper()[x] >= lmax).collect();
    let targets = uncertain_targets(g, c, bounds, sets);
    candidates.union_with(&expander_set(g, c, bounds, &sets.pess, &targets).intersection(&sets.pess));
    match argmax_by(candidates.iter(), |x| bounds.width(x)) {
        Some((x, w)) if w > c.epsilon() => Ok(BaselineStep::Evaluate(x)),
        _ => Ok(BaselineStep::Converged(best)),
    }
}

/// Two-stage rule: expander uncertainty sampling for `t <= t1` (UCB when no
/// expander is left), then UCB restricted to the safe set.
#[allow(clippy::too_many_arguments)]
pub fn stageopt_step(
    g: &DecisionGraph,
    c: &Classifier,
    bounds: &ConfidenceState,
    sets: &SafeSetState,
    means: &[f64],
    variances: &[f64],
    ucb_scale: f64,
    t: usize,
    t1: usize,
) -> Result<BaselineStep> {
    if sets.pess.is_empty() {
        return Err(GooseError::invalid("empty safe set"));
    }
    if t <= t1 {
        let targets = uncertain_targets(g, c, bounds, sets);
        let exp = expander_set(g, c, bounds, &sets.pess, &targets);
        if let Some((x, _)) = argmax_by(exp.iter(), |x| bounds.width(x)) {
            return Ok(BaselineStep::Evaluate(x));
        }
    }
    Ok(BaselineStep::Evaluate(ucb_suggest(means, variances, ucb_scale, &sets.pess)?))
}

/// Runs SafeOpt or StageOpt with objective equal to the constraint: every
/// evaluation measures `q` and conditions the shared model. The budget is
/// `max_evaluations`, falling back to `max_constraint_evals`.
pub fn run_baseline(
    graph: &DecisionGraph,
    seed: &NodeSet,
    model: &ModelSpec,
    env: &mut dyn Environment,
    cfg: &GooseConfig,
    kind: BaselineKind,
) -> Result<RunTrace> {
    let mut s = Session::new(graph, seed, model, cfg, env.constraint_truth())?;
    let budget = cfg.max_evaluations.unwrap_or(cfg.max_constraint_evals);
    for t in 1..=budget {
        let step = match kind {
            BaselineKind::SafeOpt => safeopt_step(graph, s.classifier(), s.bounds(), s.sets())?,
            BaselineKind::StageOpt { t1 } => {
                let post = s.posterior();
                let scale = cfg.beta.scale(post.observation_count() + 1, post.gamma_estimate());
                stageopt_step(
                    graph,
                    s.classifier(),
                    s.bounds(),
                    s.sets(),
                    post.means(),
                    post.variances(),
                    scale,
                    t,
                    t1,
                )?
            }
        };
        let node = match step {
            BaselineStep::Evaluate(x) | BaselineStep::Converged(x) => x,
        };
        let y = env.observe_constraint(node);
        s.evaluate(node, Some(y), EvalKind::Constraint)?;
    }
    Ok(s.finish())
}

/// Safe exploration of the whole reachable region: the exploration loop with
/// `h ≡ 1` and an oracle that always asks for some uncertain node.
pub fn smdp_runner(
    graph: &DecisionGraph,
    seed: &NodeSet,
    model: &ModelSpec,
    env: &mut dyn Environment,
    cfg: &GooseConfig,
) -> Result<RunTrace> {
    run(graph, seed, model, &mut FullExplorationOracle, &Uninformative, env, cfg)
}
