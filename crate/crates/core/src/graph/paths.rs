//! Minimum-cost paths restricted to a node subset.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{DecisionGraph, NodeSet};

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, then on node index
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Direction in which edges are followed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Distances *from* the sources.
    Forward,
    /// Distances *to* the sources.
    Backward,
}

/// Multi-source Dijkstra over nodes of `within`; sources outside `within`
/// are ignored. `edge_cost(u, v, cost)` maps a stored edge to its weight.
/// Returns distances (`inf` when unreachable) and predecessor links.
pub fn dijkstra<F>(
    g: &DecisionGraph,
    sources: &[usize],
    within: &NodeSet,
    dir: Direction,
    edge_cost: F,
) -> (Vec<f64>, Vec<Option<usize>>)
where
    F: Fn(usize, usize, f64) -> f64,
{
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if within.contains(s) && dist[s] > 0.0 {
            dist[s] = 0.0;
            heap.push(Entry { cost: 0.0, node: s });
        }
    }
    while let Some(Entry { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        let edges = match dir {
            Direction::Forward => g.successors(node),
            Direction::Backward => g.predecessors(node),
        };
        for &(next, c) in edges {
            if !within.contains(next) {
                continue;
            }
            let w = match dir {
                Direction::Forward => edge_cost(node, next, c),
                Direction::Backward => edge_cost(next, node, c),
            };
            let cand = cost + w;
            if cand < dist[next] {
                dist[next] = cand;
                prev[next] = Some(node);
                heap.push(Entry { cost: cand, node: next });
            }
        }
    }
    (dist, prev)
}

/// Cheapest path from `from` to `to` whose nodes all lie in `within`.
///
/// Returns `(inf, [])` when no such path exists; `from == to` costs zero.
pub fn min_cost_path(g: &DecisionGraph, from: usize, to: usize, within: &NodeSet) -> (f64, Vec<usize>) {
    if from == to {
        return (0.0, vec![from]);
    }
    if !within.contains(from) || !within.contains(to) {
        return (f64::INFINITY, Vec::new());
    }
    let (dist, prev) = dijkstra(g, &[from], within, Direction::Forward, |_, _, c| c);
    if dist[to].is_infinite() {
        return (f64::INFINITY, Vec::new());
    }
    let mut path = vec![to];
    let mut cur = to;
    while let Some(p) = prev[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    (dist[to], path)
}
