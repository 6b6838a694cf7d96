//! Pessimistic/optimistic constraint-satisfaction operators and their
//! limit (fixpoint) expansions.

use super::closure::ergodic;
use super::{DecisionGraph, NodeSet};
use crate::error::{GooseError, Result};
use crate::gp::{ConfidenceState, KernelSpec};
use crate::par::{self, Parallelism};

/// How a node's safety is inferred from the confidence bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ClassifierMode {
    /// `x` is certified by some `z` with `bound(z) - L d(x, z) - margin >= 0`.
    Lipschitz,
    /// `x` is certified by its own bound, `bound(x) - margin >= 0`, and must
    /// be reachable from the source set through certified nodes.
    #[default]
    Direct,
}

/// Result of a fixpoint expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitResult {
    pub set: NodeSet,
    /// Number of one-step expansions applied, including the final one that
    /// confirmed the fixpoint.
    pub iterations: usize,
}

/// Classification rule shared by every set operator of one run.
#[derive(Clone, Debug)]
pub struct Classifier {
    mode: ClassifierMode,
    lipschitz: f64,
    epsilon: f64,
    /// Dense kernel-metric table (Lipschitz mode only).
    metric: Vec<f64>,
    n: usize,
}

impl Classifier {
    pub fn direct(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            mode: ClassifierMode::Direct,
            lipschitz: 0.0,
            epsilon,
            metric: Vec::new(),
            n: 0,
        })
    }

    /// Precomputes the kernel metric between every pair of nodes.
    pub fn lipschitz(g: &DecisionGraph, kernel: &KernelSpec, lipschitz: f64, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(GooseError::invalid(format!("Lipschitz constant must be positive, got {lipschitz}")));
        }
        let n = g.node_count();
        let rows: Vec<usize> = (0..n).collect();
        let metric = par::map_ordered(&rows, Parallelism::Auto, |&i| {
            (0..n)
                .map(|j| kernel.metric_unchecked(g.point(i), g.point(j)))
                .collect::<Vec<f64>>()
        })
        .concat();
        Ok(Self {
            mode: ClassifierMode::Lipschitz,
            lipschitz,
            epsilon,
            metric,
            n,
        })
    }

    pub fn mode(&self) -> ClassifierMode {
        self.mode
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Lipschitz constant (`None` in direct mode).
    pub fn lipschitz_constant(&self) -> Option<f64> {
        (self.mode == ClassifierMode::Lipschitz).then_some(self.lipschitz)
    }

    /// Kernel metric between two nodes (Lipschitz mode only).
    pub fn metric(&self, x: usize, z: usize) -> f64 {
        self.metric[x * self.n + z]
    }

    fn certify(&self, g: &DecisionGraph, values: &[f64], margin: f64, src: &NodeSet) -> NodeSet {
        let n = g.node_count();
        match self.mode {
            ClassifierMode::Lipschitz => {
                let mut out = NodeSet::new(n);
                for z in src.iter() {
                    let vz = values[z];
                    if !(vz - margin >= 0.0) {
                        continue;
                    }
                    let row = &self.metric[z * self.n..(z + 1) * self.n];
                    for (x, d) in row.iter().enumerate() {
                        if vz - self.lipschitz * d - margin >= 0.0 {
                            out.insert(x);
                        }
                    }
                }
                out
            }
            ClassifierMode::Direct => {
                let ok = |x: usize| values[x] - margin >= 0.0;
                let mut out = NodeSet::new(n);
                let mut stack: Vec<usize> = Vec::new();
                for z in src.iter() {
                    if ok(z) && out.insert(z) {
                        stack.push(z);
                    }
                }
                for z in src.iter() {
                    for &(x, _) in g.successors(z) {
                        if ok(x) && out.insert(x) {
                            stack.push(x);
                        }
                    }
                }
                while let Some(u) = stack.pop() {
                    for &(x, _) in g.successors(u) {
                        if ok(x) && out.insert(x) {
                            stack.push(x);
                        }
                    }
                }
                out
            }
        }
    }

    /// Pessimistic operator `p_t(S)` (no margin).
    pub fn pess_op(&self, g: &DecisionGraph, bounds: &ConfidenceState, src: &NodeSet) -> NodeSet {
        self.certify(g, bounds.lower(), 0.0, src)
    }

    /// Pessimistic operator with an explicit margin, `p_t^margin(S)`.
    pub fn pess_op_margin(&self, g: &DecisionGraph, bounds: &ConfidenceState, src: &NodeSet, margin: f64) -> NodeSet {
        self.certify(g, bounds.lower(), margin, src)
    }

    /// Optimistic operator `o_t^eps(S)`.
    pub fn opt_op(&self, g: &DecisionGraph, bounds: &ConfidenceState, src: &NodeSet) -> NodeSet {
        self.certify(g, bounds.upper(), self.epsilon, src)
    }

    /// One expansion `op(S) ∩ ergodic(op(S), base)`.
    fn step(&self, g: &DecisionGraph, certified: NodeSet, base: &NodeSet) -> NodeSet {
        let erg = ergodic(g, &certified, base);
        certified.intersection(&erg)
    }

    /// `P_t^1(S)` applied to `cur` with ergodicity relative to `base`.
    pub fn pess_step(&self, g: &DecisionGraph, bounds: &ConfidenceState, cur: &NodeSet, base: &NodeSet) -> NodeSet {
        self.step(g, self.pess_op(g, bounds, cur), base)
    }

    pub fn opt_step(&self, g: &DecisionGraph, bounds: &ConfidenceState, cur: &NodeSet, base: &NodeSet) -> NodeSet {
        self.step(g, self.opt_op(g, bounds, cur), base)
    }

    fn limit<F>(&self, g: &DecisionGraph, base: &NodeSet, mut step: F) -> LimitResult
    where
        F: FnMut(&NodeSet) -> NodeSet,
    {
        let cap = 2 * g.node_count() + 2;
        let mut cur = base.clone();
        let mut iterations = 0;
        loop {
            iterations += 1;
            let next = step(&cur);
            if next == cur || iterations >= cap {
                return LimitResult { set: next, iterations };
            }
            cur = next;
        }
    }

    /// Limit of the n-step pessimistic expansion starting from `base`.
    pub fn pess_limit(&self, g: &DecisionGraph, bounds: &ConfidenceState, base: &NodeSet) -> LimitResult {
        self.limit(g, base, |cur| self.pess_step(g, bounds, cur, base))
    }

    /// Limit of the n-step optimistic expansion starting from `base`.
    pub fn opt_limit(&self, g: &DecisionGraph, bounds: &ConfidenceState, base: &NodeSet) -> LimitResult {
        self.limit(g, base, |cur| self.opt_step(g, bounds, cur, base))
    }

    /// Whether evaluating the safe node `x` could immediately certify `z`.
    pub fn is_expander(&self, g: &DecisionGraph, bounds: &ConfidenceState, x: usize, z: usize) -> bool {
        match self.mode {
            ClassifierMode::Lipschitz => bounds.upper()[x] - self.lipschitz * self.metric(x, z) >= 0.0,
            ClassifierMode::Direct => {
                g.successors(x).iter().any(|&(v, _)| v == z) || g.predecessors(x).iter().any(|&(v, _)| v == z)
            }
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(GooseError::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Pessimistic and optimistic safe sets of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafeSetState {
    pub seed: NodeSet,
    pub pess: NodeSet,
    pub opt: NodeSet,
}

impl SafeSetState {
    /// Sets at step 0: both limits are taken from the seed.
    pub fn initialize(c: &Classifier, g: &DecisionGraph, bounds: &ConfidenceState, seed: &NodeSet) -> Self {
        let pess = c.pess_limit(g, bounds, seed).set.union(seed);
        let opt = c.opt_limit(g, bounds, seed).set.union(&pess);
        Self {
            seed: seed.clone(),
            pess,
            opt,
        }
    }

    /// Recomputes both sets after the bounds changed. The optimistic set is
    /// expanded from the previous pessimistic set and always contains the
    /// new one. Returns whether the pessimistic set grew.
    pub fn advance(&mut self, c: &Classifier, g: &DecisionGraph, bounds: &ConfidenceState) -> bool {
        let prev = std::mem::replace(&mut self.pess, NodeSet::new(0));
        let pess = c.pess_limit(g, bounds, &prev).set.union(&prev);
        let opt = c.opt_limit(g, bounds, &prev).set.union(&pess);
        let grew = pess.len() > prev.len();
        self.pess = pess;
        self.opt = opt;
        grew
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(lower: Vec<f64>, upper: Vec<f64>) -> ConfidenceState {
        ConfidenceState::from_bounds(lower, upper).unwrap()
    }

    #[test]
    fn lipschitz_pess_plug_in() {
        // d(x, z) = 0.5 with L = 1 and l(z) = 1
        let k = KernelSpec::rbf(1.0, 1.0).unwrap();
        let r = (-2.0 * (1.0 - 0.125f64).ln()).sqrt();
        let g = DecisionGraph::chain(2, r).unwrap();
        let c = Classifier::lipschitz(&g, &k, 1.0, 0.1).unwrap();
        assert!((c.metric(0, 1) - 0.5).abs() < 1e-12);
        let b = bounds(vec![1.0, -5.0], vec![2.0, 5.0]);
        let p = c.pess_op(&g, &b, &NodeSet::from_indices(2, [0]));
        assert_eq!(p.to_vec(), vec![0, 1]);
        let neg = bounds(vec![-0.1, -5.0], vec![2.0, 5.0]);
        assert!(c.pess_op(&g, &neg, &NodeSet::from_indices(2, [0])).is_empty());
    }

    #[test]
    fn lipschitz_opt_radius() {
        let k = KernelSpec::rbf(1.0, 1.0).unwrap();
        let pts: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let g = DecisionGraph::chain(30, 0.1).unwrap();
        let c = Classifier::lipschitz(&g, &k, 1.0, 0.2).unwrap();
        let mut u = vec![-1.0; 30];
        u[0] = 1.0;
        let b = bounds(vec![-2.0; 30], u);
        let o = c.opt_op(&g, &b, &NodeSet::from_indices(30, [0]));
        for x in 0..30 {
            let d = k.metric(&[pts[0]], &[pts[x]]).unwrap();
            assert_eq!(o.contains(x), d <= 0.8 + 1e-12, "node {x}, d = {d}");
        }
        let low = bounds(vec![-2.0; 30], vec![0.1; 30]);
        assert!(c.opt_op(&g, &low, &NodeSet::from_indices(30, [0, 5])).is_empty());
    }

    #[test]
    fn collapsed_bounds_make_operators_agree() {
        let g = DecisionGraph::grid(4, 4, (0.0, 0.0), 0.3).unwrap();
        let k = KernelSpec::rbf(0.5, 1.0).unwrap();
        let vals: Vec<f64> = (0..16).map(|i| ((i * 7) % 5) as f64 * 0.2 - 0.3).collect();
        let b = bounds(vals.clone(), vals);
        let src = NodeSet::from_indices(16, [0, 5]);
        for c in [
            Classifier::lipschitz(&g, &k, 2.0, 1e-300).unwrap(),
            Classifier::direct(1e-300).unwrap(),
        ] {
            assert_eq!(c.pess_op(&g, &b, &src), c.opt_op(&g, &b, &src));
        }
    }

    #[test]
    fn direct_op_follows_certified_paths() {
        let g = DecisionGraph::chain(5, 1.0).unwrap();
        let c = Classifier::direct(0.1).unwrap();
        let b = bounds(vec![0.0, 0.5, -0.1, 0.4, 0.3], vec![1.0; 5]);
        let p = c.pess_op(&g, &b, &NodeSet::from_indices(5, [0]));
        assert_eq!(p.to_vec(), vec![0, 1]);
    }

    #[test]
    fn uninformative_bounds_keep_base() {
        let g = DecisionGraph::grid(3, 3, (0.0, 0.0), 1.0).unwrap();
        let seed = NodeSet::from_indices(9, [0, 1]);
        let b = ConfidenceState::new(9, &seed);
        let c = Classifier::direct(0.1).unwrap();
        let r = c.pess_limit(&g, &b, &seed);
        assert_eq!(r.set, seed);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn initialize_and_advance() {
        let g = DecisionGraph::chain(6, 1.0).unwrap();
        let seed = NodeSet::from_indices(6, [0]);
        let c = Classifier::direct(0.1).unwrap();
        let mut b = ConfidenceState::new(6, &seed);
        b.update(&[0.5; 6], &[1.0; 6], 3.0);
        let mut s = SafeSetState::initialize(&c, &g, &b, &seed);
        assert!(s.seed.is_subset(&s.pess) && s.pess.is_subset(&s.opt));
        assert_eq!(s.opt, NodeSet::full(6));
        b.update(&[0.5, 0.5, 0.5, -1.0, 0.5, 0.5], &[0.0; 6], 0.1);
        assert!(s.advance(&c, &g, &b));
        assert_eq!(s.pess.to_vec(), vec![0, 1, 2]);
        assert_eq!(s.opt.to_vec(), vec![0, 1, 2]);
    }
}
