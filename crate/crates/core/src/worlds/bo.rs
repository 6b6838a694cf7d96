use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::sampling::{seeded_rng, PriorSampler};
use crate::engine::Environment;
use crate::error::{GooseError, Result};
use crate::gp::KernelSpec;
use crate::graph::{DecisionGraph, NodeSet};

/// Smallest admissible true constraint value at the seed.
const MIN_SEED_Q: f64 = 0.2;
const MAX_WORLD_ATTEMPTS: usize = 1000;

/// Safe Bayesian-optimization instance on a regular grid.
#[derive(Clone, Debug)]
pub struct BoWorld {
    pub graph: DecisionGraph,
    pub true_q: Vec<f64>,
    /// Objective; equal to `true_q` for the generated worlds.
    pub true_f: Vec<f64>,
    pub seed: NodeSet,
    pub noise_std: f64,
    pub kernel: KernelSpec,
}

fn grid_points(dim: usize, n: usize) -> Result<DecisionGraph> {
    match dim {
        1 => {
            if n < 2 {
                return Err(GooseError::invalid("need at least two points"));
            }
            let step = 2.0 / (n - 1) as f64;
            let points: Vec<f64> = (0..n).map(|i| -1.0 + step * i as f64).collect();
            let mut g = DecisionGraph::new(1, points)?;
            for i in 1..n {
                g.add_undirected(i - 1, i, step)?;
            }
            Ok(g)
        }
        2 => {
            let side = (n as f64).sqrt().round() as usize;
            if side < 2 || side * side != n {
                return Err(GooseError::invalid(format!("{n} points do not form a square grid")));
            }
            let step = 1.0 / (side - 1) as f64;
            let unit = DecisionGraph::grid(side, side, (0.0, 0.0), step)?;
            // equal edge weights scaled to the grid step
            let mut g = DecisionGraph::new(2, unit.points().to_vec())?;
            for a in 0..n {
                for &(b, _) in unit.successors(a) {
                    g.add_edge(a, b, step)?;
                }
            }
            Ok(g)
        }
        _ => Err(GooseError::invalid(format!("dimension must be 1 or 2, got {dim}"))),
    }
}

/// Evenly spread seed candidates in index order.
fn seed_candidates(n: usize) -> [usize; 5] {
    std::array::from_fn(|k| ((2 * k + 1) * n) / 10)
}

/// Samples `q = f` from a zero-mean GP on `n` grid points (`[-1, 1]` for
/// `dim = 1`, `[0, 1]^2` for `dim = 2`). The seed is the best of five
/// evenly spread candidates; draws whose best candidate is below 0.2 are
/// rejected.
pub fn sample_gp_world<R: Rng>(dim: usize, kernel: KernelSpec, n: usize, noise_std: f64, rng: &mut R) -> Result<BoWorld> {
    if !(noise_std > 0.0) {
        return Err(GooseError::invalid("noise std must be positive"));
    }
    let graph = grid_points(dim, n)?;
    let sampler = PriorSampler::new(&kernel, dim, graph.points())?;
    for _ in 0..MAX_WORLD_ATTEMPTS {
        let q = sampler.draw(rng);
        let best = seed_candidates(n)
            .into_iter()
            .fold(None::<usize>, |acc, c| match acc {
                Some(b) if q[b] >= q[c] => Some(b),
                _ => Some(c),
            })
            .expect("five candidates");
        if q[best] >= MIN_SEED_Q {
            return Ok(BoWorld {
                seed: NodeSet::from_indices(n, [best]),
                true_f: q.clone(),
                true_q: q,
                graph,
                noise_std,
                kernel,
            });
        }
    }
    Err(GooseError::Numerical(format!(
        "no world with a safe seed in {MAX_WORLD_ATTEMPTS} draws"
    )))
}

impl BoWorld {
    /// Largest Lipschitz ratio `|q(x) - q(z)| / d(x, z)` over all node pairs,
    /// with `d` the kernel metric.
    pub fn empirical_lipschitz(&self) -> f64 {
        let n = self.graph.node_count();
        let mut l: f64 = 0.0;
        for x in 0..n {
            for z in x + 1..n {
                let d = self.kernel.metric_unchecked(self.graph.point(x), self.graph.point(z));
                if d > 0.0 {
                    l = l.max((self.true_q[x] - self.true_q[z]).abs() / d);
                }
            }
        }
        l
    }

    pub fn env(&self, seed: u64) -> BoEnv {
        BoEnv {
            q: self.true_q.clone(),
            f: self.true_f.clone(),
            noise_std: self.noise_std,
            rng: seeded_rng(seed),
        }
    }
}

/// Noisy measurements of a [`BoWorld`].
#[derive(Clone, Debug)]
pub struct BoEnv {
    q: Vec<f64>,
    f: Vec<f64>,
    noise_std: f64,
    rng: ChaCha8Rng,
}

impl BoEnv {
    fn noise(&mut self) -> f64 {
        self.noise_std * self.rng.sample::<f64, _>(StandardNormal)
    }
}

impl Environment for BoEnv {
    fn constraint_truth(&self) -> &[f64] {
        &self.q
    }

    fn observe_constraint(&mut self, node: usize) -> f64 {
        self.q[node] + self.noise()
    }

    fn observe_objective(&mut self, node: usize) -> Option<f64> {
        Some(self.f[node] + self.noise())
    }
}
