use std::time::Instant;

use super::expand::{safe_expand_step, Expansion};
use super::{check_seed, EvalKind, Evaluation, GooseConfig, Heuristic, ModelSpec, OracleContext, RunTrace, Violation};
use crate::error::{GooseError, Result};
use crate::gp::{BetaSchedule, ConfidenceState, GraphPosterior};
use crate::graph::{min_cost_path, Classifier, DecisionGraph, NodeSet, SafeSetState};

/// Model, bounds and safe sets of one run plus its trace.
///
/// Shared by the exploration loop and the baselines; every evaluation goes
/// through [`Session::evaluate`], which refuses uncertified nodes.
pub struct Session<'g> {
    graph: &'g DecisionGraph,
    classifier: Classifier,
    posterior: GraphPosterior,
    bounds: ConfidenceState,
    sets: SafeSetState,
    beta: BetaSchedule,
    truth: Vec<f64>,
    cfg: GooseConfig,
    trace: RunTrace,
    position: usize,
    clock: Instant,
}

impl<'g> Session<'g> {
    pub fn new(graph: &'g DecisionGraph, seed: &NodeSet, model: &ModelSpec, cfg: &GooseConfig, truth: &[f64]) -> Result<Self> {
        check_seed(graph, seed, truth)?;
        let classifier = cfg.classifier(graph, &model.kernel)?;
        let posterior = GraphPosterior::new(
            model.kernel,
            model.noise_std,
            model.prior_mean,
            graph.dim(),
            graph.points().to_vec(),
        )?;
        let mut bounds = ConfidenceState::new(graph.node_count(), seed);
        bounds.update(posterior.means(), posterior.variances(), cfg.beta.scale(1, 0.0));
        let sets = SafeSetState::initialize(&classifier, graph, &bounds, seed);
        let mut s = Self {
            graph,
            classifier,
            posterior,
            bounds,
            sets,
            beta: cfg.beta,
            truth: truth.to_vec(),
            cfg: cfg.clone(),
            trace: RunTrace {
                bounds_valid: true,
                ..RunTrace::default()
            },
            position: seed.iter().next().expect("checked seed"),
            clock: Instant::now(),
        };
        s.snapshot();
        Ok(s)
    }

    fn snapshot(&mut self) {
        self.trace.set_sizes.push((self.sets.pess.len(), self.sets.opt.len()));
        if self.cfg.record_sets {
            self.trace.pess_history.push(self.sets.pess.clone());
            self.trace.opt_history.push(self.sets.opt.clone());
        }
        if !self.bounds.contains_all(&self.truth) {
            self.trace.bounds_valid = false;
        }
        if let Some(w) = self.cfg.watch {
            if self.trace.watch_certified_at.is_none() && self.sets.pess.contains(w) {
                self.trace.watch_certified_at = Some(self.trace.constraint_count());
            }
        }
    }

    /// Evaluates `node` (which must be certified safe), records the outcome
    /// and, when the value conditions the constraint model, updates bounds
    /// and sets. Returns whether the pessimistic set grew.
    pub fn evaluate(&mut self, node: usize, value: Option<f64>, kind: EvalKind) -> Result<bool> {
        if !self.sets.pess.contains(node) {
            return Err(GooseError::invalid(format!(
                "refusing to evaluate uncertified node {node}"
            )));
        }
        let true_q = self.truth[node];
        if true_q < 0.0 {
            self.trace.violations.push(Violation { node, true_q });
        }
        let (cost, _) = min_cost_path(self.graph, self.position, node, &self.sets.pess);
        if cost.is_finite() {
            self.trace.trajectory_cost += cost;
        }
        self.position = node;
        self.trace.evaluations.push(Evaluation { kind, node, value, true_q });

        let conditions = match kind {
            EvalKind::Constraint => value,
            EvalKind::Objective if self.cfg.objective_updates_constraint => value,
            EvalKind::Objective => None,
        };
        let mut grew = false;
        if let Some(y) = conditions {
            self.posterior.observe(node, y)?;
            let t = self.posterior.observation_count() + 1;
            let scale = self.beta.scale(t, self.posterior.gamma_estimate());
            self.bounds.update(self.posterior.means(), self.posterior.variances(), scale);
            grew = self.sets.advance(&self.classifier, self.graph, &self.bounds);
        }
        self.snapshot();
        let now = Instant::now();
        self.trace.step_times.push(now - self.clock);
        self.clock = now;
        Ok(grew)
    }

    /// One safe expansion step towards `goal`.
    pub fn expand(&self, heuristic: &dyn Heuristic, goal: usize) -> Expansion {
        safe_expand_step(self.graph, &self.classifier, &self.bounds, &self.sets, heuristic, goal)
    }

    pub fn oracle_context(&self) -> OracleContext<'_> {
        OracleContext {
            graph: self.graph,
            pess: &self.sets.pess,
            means: self.posterior.means(),
            variances: self.posterior.variances(),
            observation_count: self.posterior.observation_count(),
            gamma: self.posterior.gamma_estimate(),
        }
    }

    pub fn graph(&self) -> &'g DecisionGraph {
        self.graph
    }

    pub fn classifier(&self) -> &Classifier {
        &self.classifier
    }

    pub fn posterior(&self) -> &GraphPosterior {
        &self.posterior
    }

    pub fn bounds(&self) -> &ConfidenceState {
        &self.bounds
    }

    pub fn sets(&self) -> &SafeSetState {
        &self.sets
    }

    pub fn pess(&self) -> &NodeSet {
        &self.sets.pess
    }

    pub fn opt(&self) -> &NodeSet {
        &self.sets.opt
    }

    pub fn config(&self) -> &GooseConfig {
        &self.cfg
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    pub(crate) fn trace_mut(&mut self) -> &mut RunTrace {
        &mut self.trace
    }

    pub fn watch_reached(&self) -> bool {
        self.cfg.watch.is_some_and(|w| self.sets.pess.contains(w))
    }

    pub fn evaluations_exhausted(&self) -> bool {
        self.cfg
            .max_evaluations
            .is_some_and(|m| self.trace.evaluations.len() >= m)
    }

    pub fn constraint_budget_exhausted(&self) -> bool {
        self.evaluations_exhausted() || self.trace.constraint_count() >= self.cfg.max_constraint_evals
    }

    pub fn mark_truncated(&mut self) {
        self.trace.truncated = true;
    }

    pub fn finish(mut self) -> RunTrace {
        self.trace.final_pess = self.sets.pess;
        self.trace.final_opt = self.sets.opt;
        self.trace
    }
}
