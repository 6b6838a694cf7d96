use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::sampling::{seeded_rng, PriorSampler};
use crate::engine::{Environment, ModelSpec};
use crate::error::{GooseError, Result};
use crate::gp::KernelSpec;
use crate::graph::{baseline_sets, BaselineRule, DecisionGraph, NodeSet};

const MAX_PAIR_ATTEMPTS: usize = 100;
const MAX_WORLD_ATTEMPTS: usize = 100;

/// Neighbour offsets in node order: right, left, down, up.
const MOVES: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Graph whose nodes are the moves `a -> b` between 4-adjacent cells of a
/// `w x h` grid. Move `a -> b` leads to every move `b -> c`, including the
/// U-turn `b -> a`. Nodes sit at the midpoint of their move; every edge
/// costs `cell_size`. Also returns the `(from, to)` cells of each node.
pub fn transition_graph(w: usize, h: usize, cell_size: f64) -> Result<(DecisionGraph, Vec<(usize, usize)>)> {
    if w < 2 || h < 2 {
        return Err(GooseError::invalid(format!("grid {w}x{h} is too small")));
    }
    if !(cell_size > 0.0 && cell_size.is_finite()) {
        return Err(GooseError::invalid("cell size must be positive"));
    }
    let mut index = vec![[usize::MAX; 4]; w * h];
    let mut moves = Vec::new();
    let mut points = Vec::new();
    for a in 0..w * h {
        let (ax, ay) = ((a % w) as isize, (a / w) as isize);
        for (k, (dx, dy)) in MOVES.iter().enumerate() {
            let (bx, by) = (ax + dx, ay + dy);
            if bx < 0 || by < 0 || bx >= w as isize || by >= h as isize {
                continue;
            }
            let b = by as usize * w + bx as usize;
            index[a][k] = moves.len();
            moves.push((a, b));
            points.push((ax + bx) as f64 * 0.5 * cell_size);
            points.push((ay + by) as f64 * 0.5 * cell_size);
        }
    }
    let mut g = DecisionGraph::new(2, points)?;
    for (i, &(_, b)) in moves.iter().enumerate() {
        for &j in index[b].iter().filter(|&&j| j != usize::MAX) {
            g.add_edge(i, j, cell_size)?;
        }
    }
    Ok((g, moves))
}

/// Parameters of generated path-planning worlds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridOptions {
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    pub prior_mean: f64,
    pub kernel: KernelSpec,
    pub noise_std: f64,
    /// Accuracy used to decide which targets count as reachable.
    pub epsilon: f64,
    /// Smallest admissible true constraint value at the seed.
    pub min_seed_q: f64,
}

impl GridOptions {
    /// Synthetic defaults: mean 0.6, RBF with lengthscale 2 and variance 1.
    pub fn synthetic(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cell_size: 1.0,
            prior_mean: 0.6,
            kernel: KernelSpec::rbf(2.0, 1.0).expect("valid kernel"),
            noise_std: 0.01,
            epsilon: 0.1,
            min_seed_q: 0.2,
        }
    }

    pub fn model(&self) -> ModelSpec {
        ModelSpec {
            kernel: self.kernel,
            noise_std: self.noise_std,
            prior_mean: self.prior_mean,
        }
    }
}

/// Path-planning instance over grid moves.
#[derive(Clone, Debug)]
pub struct GridMdpWorld {
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    pub graph: DecisionGraph,
    /// `(from, to)` cells of every node.
    pub moves: Vec<(usize, usize)>,
    pub true_q: Vec<f64>,
    /// Safe moves between the source cell and its neighbours, both ways.
    pub seed: NodeSet,
    pub source: usize,
    pub target: usize,
    /// Lowest-index move into `target` inside the reachable region.
    pub goal: usize,
    pub model: ModelSpec,
}

fn manhattan(w: usize, a: usize, b: usize) -> usize {
    (a % w).abs_diff(b % w) + (a / w).abs_diff(b / w)
}

impl GridMdpWorld {
    /// Picks a source/target pair for a fixed constraint. The source is a
    /// random cell with at least one outgoing move with `q >= min_seed_q`;
    /// every such move and its reverse form the seed. The target
    /// is drawn among cells at Manhattan distance `>= (w + h) / 4` that have
    /// an incoming move inside the ground-truth reachable region.
    pub fn from_constraint<R: Rng>(
        opts: &GridOptions,
        graph: DecisionGraph,
        moves: Vec<(usize, usize)>,
        true_q: Vec<f64>,
        rng: &mut R,
    ) -> Result<Option<Self>> {
        let (w, h) = (opts.width, opts.height);
        let n = graph.node_count();
        let mut out_moves = vec![Vec::new(); w * h];
        for (i, &(a, _)) in moves.iter().enumerate() {
            out_moves[a].push(i);
        }
        let min_dist = (w + h) / 4;
        for _ in 0..MAX_PAIR_ATTEMPTS {
            let source = rng.random_range(0..w * h);
            let mut seed = NodeSet::new(n);
            for &m in &out_moves[source] {
                if true_q[m] >= opts.min_seed_q {
                    let (a, b) = moves[m];
                    let back = out_moves[b].iter().copied().find(|&r| moves[r].1 == a).expect("reverse move");
                    seed.insert(m);
                    seed.insert(back);
                }
            }
            if seed.is_empty() {
                continue;
            }
            let region = baseline_sets(&graph, &true_q, &seed, BaselineRule::Direct, opts.epsilon)?;
            let mut entry = vec![usize::MAX; w * h];
            for m in region.iter() {
                let to = moves[m].1;
                entry[to] = entry[to].min(m);
            }
            let targets: Vec<usize> = (0..w * h)
                .filter(|&c| entry[c] != usize::MAX && manhattan(w, source, c) >= min_dist)
                .collect();
            if targets.is_empty() {
                continue;
            }
            let target = targets[rng.random_range(0..targets.len())];
            return Ok(Some(Self {
                width: w,
                height: h,
                cell_size: opts.cell_size,
                graph,
                moves,
                true_q,
                seed,
                source,
                target,
                goal: entry[target],
                model: opts.model(),
            }));
        }
        Ok(None)
    }

    pub fn env(&self, seed: u64) -> TransitionEnv {
        TransitionEnv {
            q: self.true_q.clone(),
            noise_std: self.model.noise_std,
            rng: seeded_rng(seed),
        }
    }
}

/// Samples a synthetic world: `q` at every move midpoint from a GP with
/// the configured mean and kernel, identical for both directions of a move.
pub fn sample_grid_world<R: Rng>(opts: &GridOptions, rng: &mut R) -> Result<GridMdpWorld> {
    if opts.width < 3 || opts.height < 3 {
        return Err(GooseError::invalid("grid worlds need at least 3x3 cells"));
    }
    let (graph, moves) = transition_graph(opts.width, opts.height, opts.cell_size)?;
    // one value per undirected move, shared by both directions
    let mut undirected = HashMap::new();
    let mut slot = vec![0usize; moves.len()];
    let mut points = Vec::new();
    for (i, &(a, b)) in moves.iter().enumerate() {
        if a < b {
            slot[i] = undirected.len();
            undirected.insert((a, b), slot[i]);
            points.extend_from_slice(graph.point(i));
        }
    }
    for (i, &(a, b)) in moves.iter().enumerate() {
        if a > b {
            slot[i] = undirected[&(b, a)];
        }
    }
    let sampler = PriorSampler::new(&opts.kernel, 2, &points)?;
    for _ in 0..MAX_WORLD_ATTEMPTS {
        let draw = sampler.draw(rng);
        let q: Vec<f64> = slot.iter().map(|&s| opts.prior_mean + draw[s]).collect();
        if let Some(world) = GridMdpWorld::from_constraint(opts, graph.clone(), moves.clone(), q, rng)? {
            return Ok(world);
        }
    }
    Err(GooseError::Numerical(format!(
        "no source/target pair found in {MAX_WORLD_ATTEMPTS} worlds"
    )))
}

/// Noisy constraint measurements over moves; there is no objective.
#[derive(Clone, Debug)]
pub struct TransitionEnv {
    q: Vec<f64>,
    noise_std: f64,
    rng: ChaCha8Rng,
}

impl Environment for TransitionEnv {
    fn constraint_truth(&self) -> &[f64] {
        &self.q
    }

    fn observe_constraint(&mut self, node: usize) -> f64 {
        self.q[node] + self.noise_std * self.rng.sample::<f64, _>(StandardNormal)
    }

    fn observe_objective(&mut self, _node: usize) -> Option<f64> {
        None
    }
}
