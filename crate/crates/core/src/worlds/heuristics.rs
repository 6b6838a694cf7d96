use crate::engine::{Heuristic, HeuristicContext};
use crate::gp::KernelSpec;
use crate::graph::{dijkstra, DecisionGraph, Direction};

/// Edge weights used when measuring distance to the goal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeCost {
    /// Costs stored in the graph.
    Graph,
    /// Kernel metric between the endpoints.
    Metric(KernelSpec),
}

impl EdgeCost {
    fn weight(&self, g: &DecisionGraph, u: usize, v: usize, c: f64) -> f64 {
        match self {
            EdgeCost::Graph => c,
            EdgeCost::Metric(k) => k.metric_unchecked(g.point(u), g.point(v)),
        }
    }
}

/// Priority `-c(x, goal)` with the cost measured inside the optimistic set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoalDistanceHeuristic {
    pub edges: EdgeCost,
}

impl Heuristic for GoalDistanceHeuristic {
    fn priorities(&self, targets: &[usize], ctx: &HeuristicContext<'_>) -> Vec<f64> {
        let g = ctx.graph;
        let (dist, _) = dijkstra(g, &[ctx.goal], ctx.opt, Direction::Backward, |u, v, c| self.edges.weight(g, u, v, c));
        targets.iter().map(|&x| -dist[x]).collect()
    }
}

/// `h(x) = -(min over predecessors x' of c(start, x', pess) + kappa c(x, goal, opt))`.
///
/// The first leg is the cheapest safe route to a node from which `x` can be
/// tried; the second is an optimistic estimate of the remaining cost.
#[derive(Clone, Debug, PartialEq)]
pub struct PathHeuristic {
    pub start: Vec<usize>,
    pub kappa: f64,
}

impl Heuristic for PathHeuristic {
    fn priorities(&self, targets: &[usize], ctx: &HeuristicContext<'_>) -> Vec<f64> {
        let g = ctx.graph;
        let (safe, _) = dijkstra(g, &self.start, ctx.pess, Direction::Forward, |_, _, c| c);
        let (togo, _) = dijkstra(g, &[ctx.goal], ctx.opt, Direction::Backward, |_, _, c| c);
        targets
            .iter()
            .map(|&x| {
                let reach = g
                    .predecessors(x)
                    .iter()
                    .map(|&(p, _)| safe[p])
                    .fold(f64::INFINITY, f64::min);
                let total = reach + self.kappa * togo[x];
                if total.is_finite() {
                    -total
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect()
    }
}
