use super::{Heuristic, HeuristicContext};
use crate::gp::ConfidenceState;
use crate::graph::{Classifier, ClassifierMode, DecisionGraph, NodeSet, SafeSetState};

/// Outcome of one safe expansion step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Expansion {
    /// Evaluate the constraint at `node`; `priority` is the level it serves.
    Evaluate { node: usize, priority: f64 },
    /// No uncertain safe node can certify any outside target.
    Stalled,
}

/// Optimistic nodes that are not yet certifiable from the safe set.
pub fn uncertain_targets(g: &DecisionGraph, c: &Classifier, bounds: &ConfidenceState, sets: &SafeSetState) -> Vec<usize> {
    let p0 = c.pess_op(g, bounds, &sets.pess);
    sets.opt.difference(&p0).to_vec()
}

fn uncertain_safe(bounds: &ConfidenceState, pess: &NodeSet, eps: f64) -> Vec<usize> {
    pess.iter().filter(|&x| bounds.width(x) > eps).collect()
}

fn expanders_of(
    g: &DecisionGraph,
    c: &Classifier,
    bounds: &ConfidenceState,
    uncertain: &[usize],
    targets: &[usize],
) -> NodeSet {
    let n = g.node_count();
    let mut out = NodeSet::new(n);
    match c.mode() {
        ClassifierMode::Lipschitz => {
            for &x in uncertain {
                if targets.iter().any(|&z| c.is_expander(g, bounds, x, z)) {
                    out.insert(x);
                }
            }
        }
        ClassifierMode::Direct => {
            let mut w = NodeSet::new(n);
            for &x in uncertain {
                w.insert(x);
            }
            for &z in targets {
                for &(x, _) in g.successors(z).iter().chain(g.predecessors(z)) {
                    if w.contains(x) {
                        out.insert(x);
                    }
                }
            }
        }
    }
    out
}

/// Uncertain safe nodes that could certify at least one of `targets`.
pub fn expander_set(g: &DecisionGraph, c: &Classifier, bounds: &ConfidenceState, pess: &NodeSet, targets: &[usize]) -> NodeSet {
    let w = uncertain_safe(bounds, pess, c.epsilon());
    expanders_of(g, c, bounds, &w, targets)
}

fn widest(bounds: &ConfidenceState, set: &NodeSet) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for x in set.iter() {
        let w = bounds.width(x);
        if best.is_none_or(|(_, bw)| w > bw) {
            best = Some((x, w));
        }
    }
    best.map(|(x, _)| x)
}

/// Picks the widest expander serving the highest priority level that has
/// any expander. Ties go to the lowest node index.
pub fn safe_expand_step(
    g: &DecisionGraph,
    c: &Classifier,
    bounds: &ConfidenceState,
    sets: &SafeSetState,
    heuristic: &dyn Heuristic,
    goal: usize,
) -> Expansion {
    let w = uncertain_safe(bounds, &sets.pess, c.epsilon());
    if w.is_empty() {
        return Expansion::Stalled;
    }
    let targets = uncertain_targets(g, c, bounds, sets);
    if targets.is_empty() {
        return Expansion::Stalled;
    }
    let ctx = HeuristicContext {
        graph: g,
        pess: &sets.pess,
        opt: &sets.opt,
        goal,
    };
    let prio = heuristic.priorities(&targets, &ctx);
    debug_assert_eq!(prio.len(), targets.len());
    let mut ranked: Vec<(f64, usize)> = targets
        .iter()
        .zip(&prio)
        .map(|(&z, &p)| (if p.is_nan() { f64::NEG_INFINITY } else { p }, z))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut start = 0;
    while start < ranked.len() {
        let alpha = ranked[start].0;
        let mut end = start;
        while end < ranked.len() && ranked[end].0 == alpha {
            end += 1;
        }
        let level: Vec<usize> = ranked[start..end].iter().map(|&(_, z)| z).collect();
        let exp = expanders_of(g, c, bounds, &w, &level);
        if let Some(node) = widest(bounds, &exp) {
            return Expansion::Evaluate { node, priority: alpha };
        }
        start = end;
    }
    Expansion::Stalled
}
