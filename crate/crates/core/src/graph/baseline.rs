//! Ground-truth safe and ergodic sets computed from the true constraint.

use super::closure::ergodic;
use super::{Classifier, ClassifierMode, DecisionGraph, NodeSet};
use crate::error::{GooseError, Result};

/// How the true constraint certifies neighbours; mirrors [`ClassifierMode`].
#[derive(Clone, Copy, Debug)]
pub enum BaselineRule<'a> {
    /// Uses the classifier's metric table and Lipschitz constant.
    Lipschitz(&'a Classifier),
    Direct,
}

impl<'a> BaselineRule<'a> {
    /// Rule matching a run's classifier.
    pub fn matching(c: &'a Classifier) -> Self {
        match c.mode() {
            ClassifierMode::Lipschitz => BaselineRule::Lipschitz(c),
            ClassifierMode::Direct => BaselineRule::Direct,
        }
    }
}

/// `R^safe_eps(S)`: `S` plus every node the true constraint certifies with
/// margin `eps`.
fn safe_expansion(g: &DecisionGraph, q: &[f64], rule: BaselineRule<'_>, s: &NodeSet, eps: f64) -> NodeSet {
    let n = g.node_count();
    let mut out = s.clone();
    match rule {
        BaselineRule::Lipschitz(c) => {
            let l = c.lipschitz_constant().unwrap_or(0.0);
            for z in s.iter() {
                for x in 0..n {
                    if q[z] - eps - l * c.metric(x, z) >= 0.0 {
                        out.insert(x);
                    }
                }
            }
        }
        BaselineRule::Direct => {
            let mut stack: Vec<usize> = s.iter().collect();
            while let Some(u) = stack.pop() {
                for &(x, _) in g.successors(u) {
                    if q[x] - eps >= 0.0 && out.insert(x) {
                        stack.push(x);
                    }
                }
            }
        }
    }
    out
}

/// Largest safe and ergodic set reachable from `seed` when `q` is known up
/// to accuracy `eps` (the fixpoint of `R_eps`).
pub fn baseline_sets(g: &DecisionGraph, q: &[f64], seed: &NodeSet, rule: BaselineRule<'_>, eps: f64) -> Result<NodeSet> {
    if q.len() != g.node_count() {
        return Err(GooseError::DimensionMismatch {
            expected: g.node_count(),
            actual: q.len(),
        });
    }
    if !(eps >= 0.0) {
        return Err(GooseError::invalid(format!("accuracy must be non-negative, got {eps}")));
    }
    if seed.is_empty() {
        return Err(GooseError::invalid("empty seed set"));
    }
    if let Some(bad) = seed.iter().find(|&s| !(q[s] >= 0.0)) {
        return Err(GooseError::invalid(format!("seed node {bad} violates the constraint (q = {})", q[bad])));
    }
    let mut cur = seed.clone();
    loop {
        let safe = safe_expansion(g, q, rule, &cur, eps);
        let next = safe.intersection(&ergodic(g, &safe, &cur));
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}
