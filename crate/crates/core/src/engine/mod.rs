//! The goal-oriented exploration loop.
//!
//! [`run`] wraps an unsafe oracle: suggestions inside the pessimistic safe
//! set are evaluated directly, anything else triggers safe expansion steps
//! guided by a [`Heuristic`] until the suggestion is certified or becomes
//! implausible.

mod bound;
mod expand;
mod session;

pub use bound::{sample_bound, sample_bound_capped, SAMPLE_BOUND_CAP};
pub use expand::{expander_set, safe_expand_step, uncertain_targets, Expansion};
pub use session::Session;

use std::time::Duration;

use crate::error::{GooseError, Result};
use crate::gp::{BetaSchedule, KernelSpec};
use crate::graph::{reach_closure_within, Classifier, ClassifierMode, DecisionGraph, NodeSet};

/// Read-only view handed to oracles.
pub struct OracleContext<'a> {
    pub graph: &'a DecisionGraph,
    pub pess: &'a NodeSet,
    /// Posterior of the constraint model at every node.
    pub means: &'a [f64],
    pub variances: &'a [f64],
    /// Observations conditioning the constraint model.
    pub observation_count: usize,
    /// Information-gain estimate of the constraint model.
    pub gamma: f64,
}

/// An unsafe interactive-learning algorithm proposing the next decision.
///
/// Implementations must be deterministic given the same observation history
/// and domain.
pub trait Oracle {
    /// Next desired decision inside `domain`, or `None` when finished.
    fn suggest(&mut self, domain: &NodeSet, ctx: &OracleContext<'_>) -> Result<Option<usize>>;

    /// Reports the objective observation at a previously suggested node.
    fn notify(&mut self, _node: usize, _value: Option<f64>) {}
}

/// Read-only view handed to heuristics.
pub struct HeuristicContext<'a> {
    pub graph: &'a DecisionGraph,
    pub pess: &'a NodeSet,
    pub opt: &'a NodeSet,
    pub goal: usize,
}

/// Priority over uncertain outside nodes; higher is explored first.
pub trait Heuristic {
    fn priorities(&self, targets: &[usize], ctx: &HeuristicContext<'_>) -> Vec<f64>;
}

/// `h ≡ 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Uninformative;

impl Heuristic for Uninformative {
    fn priorities(&self, targets: &[usize], _ctx: &HeuristicContext<'_>) -> Vec<f64> {
        vec![1.0; targets.len()]
    }
}

/// Ground truth behind the noisy evaluations.
pub trait Environment {
    /// True constraint value at every node.
    fn constraint_truth(&self) -> &[f64];
    /// Noisy constraint measurement.
    fn observe_constraint(&mut self, node: usize) -> f64;
    /// Noisy objective measurement, `None` when the task has no objective.
    fn observe_objective(&mut self, node: usize) -> Option<f64>;
}

/// Prior of the constraint GP.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    pub kernel: KernelSpec,
    pub noise_std: f64,
    pub prior_mean: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GooseConfig {
    pub epsilon: f64,
    pub beta: BetaSchedule,
    pub mode: ClassifierMode,
    /// Required in Lipschitz mode.
    pub lipschitz: Option<f64>,
    /// Weight of the optimistic leg in the path heuristic.
    pub kappa: f64,
    pub max_constraint_evals: usize,
    /// Cap on constraint plus objective evaluations.
    pub max_evaluations: Option<usize>,
    pub rng_seed: u64,
    /// Objective observations also condition the constraint model (`f = q`).
    pub objective_updates_constraint: bool,
    /// Keep a copy of both sets after every evaluation.
    pub record_sets: bool,
    /// Node whose certification time is recorded.
    pub watch: Option<usize>,
    /// Stop as soon as `watch` enters the pessimistic set.
    pub stop_on_watch: bool,
}

impl Default for GooseConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            beta: BetaSchedule::default(),
            mode: ClassifierMode::Direct,
            lipschitz: None,
            kappa: 1.5,
            max_constraint_evals: 1000,
            max_evaluations: None,
            rng_seed: 0,
            objective_updates_constraint: false,
            record_sets: false,
            watch: None,
            stop_on_watch: false,
        }
    }
}

impl GooseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(GooseError::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.kappa > 1.0) {
            return Err(GooseError::invalid(format!("kappa must exceed 1, got {}", self.kappa)));
        }
        if self.mode == ClassifierMode::Lipschitz && self.lipschitz.is_none() {
            return Err(GooseError::invalid("lipschitz mode needs a Lipschitz constant"));
        }
        Ok(())
    }

    /// Set classifier matching this configuration.
    pub fn classifier(&self, g: &DecisionGraph, kernel: &KernelSpec) -> Result<Classifier> {
        self.validate()?;
        match self.mode {
            ClassifierMode::Direct => Classifier::direct(self.epsilon),
            ClassifierMode::Lipschitz => {
                let l = self.lipschitz.expect("validated");
                Classifier::lipschitz(g, kernel, l, self.epsilon)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalKind {
    Constraint,
    Objective,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub kind: EvalKind,
    pub node: usize,
    /// Observed value; `None` for objective evaluations without an objective.
    pub value: Option<f64>,
    pub true_q: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub node: usize,
    pub true_q: f64,
}

/// Everything recorded during one run.
#[derive(Clone, Debug, Default)]
pub struct RunTrace {
    /// All evaluations in order (shared evaluation axis).
    pub evaluations: Vec<Evaluation>,
    /// `(|pess|, |opt|)` initially and after every evaluation.
    pub set_sizes: Vec<(usize, usize)>,
    /// Wall time of every evaluation step, including set and model updates.
    pub step_times: Vec<Duration>,
    pub violations: Vec<Violation>,
    /// Confidence intervals contained the truth at every node throughout.
    pub bounds_valid: bool,
    /// A budget ran out before the oracle finished.
    pub truncated: bool,
    pub stalls: usize,
    pub outer_iterations: usize,
    /// Number of constraint evaluations after which the watched node was
    /// certified.
    pub watch_certified_at: Option<usize>,
    /// The oracle's goal became unreachable.
    pub goal_unreachable: Option<usize>,
    /// Summed cost of moving between consecutive evaluations inside the
    /// pessimistic set.
    pub trajectory_cost: f64,
    pub pess_history: Vec<NodeSet>,
    pub opt_history: Vec<NodeSet>,
    pub final_pess: NodeSet,
    pub final_opt: NodeSet,
}

impl RunTrace {
    /// `(t, node, value)` for every constraint evaluation, `t` from 1.
    pub fn constraint_evals(&self) -> Vec<(usize, usize, f64)> {
        self.evaluations
            .iter()
            .filter(|e| e.kind == EvalKind::Constraint)
            .enumerate()
            .map(|(i, e)| (i + 1, e.node, e.value.unwrap_or(f64::NAN)))
            .collect()
    }

    /// `(k, node, value)` for every objective evaluation, `k` from 1.
    pub fn objective_evals(&self) -> Vec<(usize, usize, Option<f64>)> {
        self.evaluations
            .iter()
            .filter(|e| e.kind == EvalKind::Objective)
            .enumerate()
            .map(|(i, e)| (i + 1, e.node, e.value))
            .collect()
    }

    pub fn constraint_count(&self) -> usize {
        self.evaluations.iter().filter(|e| e.kind == EvalKind::Constraint).count()
    }

    pub fn is_safe(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mean_step_time(&self) -> Duration {
        if self.step_times.is_empty() {
            return Duration::ZERO;
        }
        self.step_times.iter().sum::<Duration>() / self.step_times.len() as u32
    }
}

/// Checks the seed preconditions: nonempty, safe, internally connected.
pub fn check_seed(g: &DecisionGraph, seed: &NodeSet, truth: &[f64]) -> Result<()> {
    if seed.capacity() != g.node_count() || truth.len() != g.node_count() {
        return Err(GooseError::DimensionMismatch {
            expected: g.node_count(),
            actual: if truth.len() != g.node_count() { truth.len() } else { seed.capacity() },
        });
    }
    let first = seed.iter().next().ok_or_else(|| GooseError::invalid("seed set is empty"))?;
    if let Some(bad) = seed.iter().find(|&x| !(truth[x] >= 0.0)) {
        return Err(GooseError::invalid(format!(
            "seed node {bad} is unsafe (q = {})",
            truth[bad]
        )));
    }
    if seed.len() > 1 {
        for s in seed.iter() {
            let reach = reach_closure_within(g, seed, &NodeSet::from_indices(seed.capacity(), [s]));
            if reach.len() != seed.len() {
                return Err(GooseError::invalid(format!(
                    "seed is not internally connected (from node {first})"
                )));
            }
        }
    }
    Ok(())
}

/// Runs the exploration loop until the oracle finishes or a budget is hit.
pub fn run(
    graph: &DecisionGraph,
    seed: &NodeSet,
    model: &ModelSpec,
    oracle: &mut dyn Oracle,
    heuristic: &dyn Heuristic,
    env: &mut dyn Environment,
    cfg: &GooseConfig,
) -> Result<RunTrace> {
    let mut session = Session::new(graph, seed, model, cfg, env.constraint_truth())?;
    let mut excluded = NodeSet::new(graph.node_count());
    // every outer iteration evaluates, grows the safe set or shrinks the
    // domain, so this cap is only reached through objective evaluations
    let outer_cap = cfg
        .max_evaluations
        .unwrap_or(cfg.max_constraint_evals)
        .saturating_add(cfg.max_constraint_evals)
        .saturating_add(1)
        .saturating_mul(graph.node_count() + 1);

    'outer: loop {
        if session.watch_reached() && cfg.stop_on_watch {
            break;
        }
        if session.trace().outer_iterations >= outer_cap {
            session.mark_truncated();
            break;
        }
        session.trace_mut().outer_iterations += 1;
        let domain = session.opt().difference(&excluded);
        let goal = {
            let ctx = session.oracle_context();
            match oracle.suggest(&domain, &ctx) {
                Ok(Some(goal)) => goal,
                Ok(None) => break,
                Err(GooseError::GoalUnreachable(g)) => {
                    session.trace_mut().goal_unreachable = Some(g);
                    break;
                }
                Err(e) => return Err(e),
            }
        };
        if !domain.contains(goal) {
            return Err(GooseError::invalid(format!(
                "oracle suggested node {goal} outside its domain"
            )));
        }
        loop {
            if session.pess().contains(goal) {
                if session.evaluations_exhausted() {
                    session.mark_truncated();
                    break 'outer;
                }
                let value = env.observe_objective(goal);
                if session.evaluate(goal, value, EvalKind::Objective)? {
                    excluded.clear();
                }
                oracle.notify(goal, value);
                continue 'outer;
            }
            if session.constraint_budget_exhausted() {
                session.mark_truncated();
                break 'outer;
            }
            match session.expand(heuristic, goal) {
                Expansion::Evaluate { node, .. } => {
                    let y = env.observe_constraint(node);
                    if session.evaluate(node, Some(y), EvalKind::Constraint)? {
                        excluded.clear();
                    }
                    if cfg.stop_on_watch && session.watch_reached() {
                        break 'outer;
                    }
                    if !session.opt().contains(goal) {
                        continue 'outer;
                    }
                }
                Expansion::Stalled => {
                    excluded.insert(goal);
                    session.trace_mut().stalls += 1;
                    continue 'outer;
                }
            }
        }
    }
    Ok(session.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed {
        q: Vec<f64>,
    }

    impl Environment for Fixed {
        fn constraint_truth(&self) -> &[f64] {
            &self.q
        }
        fn observe_constraint(&mut self, node: usize) -> f64 {
            self.q[node]
        }
        fn observe_objective(&mut self, node: usize) -> Option<f64> {
            Some(self.q[node])
        }
    }

    struct Goal(usize, bool);

    impl Oracle for Goal {
        fn suggest(&mut self, domain: &NodeSet, _ctx: &OracleContext<'_>) -> Result<Option<usize>> {
            if self.1 {
                return Ok(None);
            }
            if domain.contains(self.0) {
                Ok(Some(self.0))
            } else {
                Err(GooseError::GoalUnreachable(self.0))
            }
        }
        fn notify(&mut self, _node: usize, _value: Option<f64>) {
            self.1 = true;
        }
    }

    fn model_with(lengthscale: f64) -> ModelSpec {
        ModelSpec {
            kernel: KernelSpec::rbf(lengthscale, 1.0).unwrap(),
            noise_std: 0.01,
            prior_mean: 0.0,
        }
    }

    fn model() -> ModelSpec {
        model_with(10.0)
    }

    #[test]
    fn goal_in_seed_needs_no_constraint_evaluations() {
        let g = DecisionGraph::chain(5, 1.0).unwrap();
        let mut env = Fixed { q: vec![1.0; 5] };
        let seed = NodeSet::from_indices(5, [2]);
        let trace = run(&g, &seed, &model(), &mut Goal(2, false), &Uninformative, &mut env, &GooseConfig::default()).unwrap();
        assert_eq!(trace.constraint_count(), 0);
        assert_eq!(trace.objective_evals(), vec![(1, 2, Some(1.0))]);
    }

    #[test]
    fn reaches_goal_along_chain() {
        let g = DecisionGraph::chain(6, 1.0).unwrap();
        let mut env = Fixed { q: vec![1.0; 6] };
        let seed = NodeSet::from_indices(6, [0]);
        let trace = run(&g, &seed, &model(), &mut Goal(5, false), &Uninformative, &mut env, &GooseConfig::default()).unwrap();
        assert!(trace.is_safe());
        assert!(trace.final_pess.contains(5));
        assert_eq!(trace.objective_evals().len(), 1);
        assert!(trace.bounds_valid);
    }

    #[test]
    fn unsafe_goal_is_abandoned() {
        let g = DecisionGraph::chain(4, 1.0).unwrap();
        let mut env = Fixed { q: vec![1.0, 1.0, -1.0, 1.0] };
        let seed = NodeSet::from_indices(4, [0]);
        let trace = run(&g, &seed, &model_with(0.6), &mut Goal(3, false), &Uninformative, &mut env, &GooseConfig::default()).unwrap();
        assert!(trace.is_safe());
        assert_eq!(trace.goal_unreachable, Some(3));
        assert!(!trace.final_pess.contains(2));
    }

    #[test]
    fn rejects_bad_seeds() {
        let g = DecisionGraph::chain(4, 1.0).unwrap();
        let mut env = Fixed { q: vec![-1.0, 1.0, 1.0, 1.0] };
        let cfg = GooseConfig::default();
        let unsafe_seed = NodeSet::from_indices(4, [0]);
        assert!(run(&g, &unsafe_seed, &model(), &mut Goal(3, false), &Uninformative, &mut env, &cfg).is_err());
        let split = NodeSet::from_indices(4, [1, 3]);
        assert!(run(&g, &split, &model(), &mut Goal(3, false), &Uninformative, &mut env, &cfg).is_err());
        let empty = NodeSet::new(4);
        assert!(run(&g, &empty, &model(), &mut Goal(3, false), &Uninformative, &mut env, &cfg).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = GooseConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.kappa = 1.0;
        assert!(cfg.validate().is_err());
        cfg.kappa = 2.0;
        cfg.mode = ClassifierMode::Lipschitz;
        assert!(cfg.validate().is_err());
        cfg.lipschitz = Some(1.0);
        cfg.epsilon = 0.0;
        assert!(cfg.validate().is_err());
    }
}
