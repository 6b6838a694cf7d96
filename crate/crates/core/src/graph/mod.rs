//! Decision graph and the set calculus used to classify decisions.

mod baseline;
mod closure;
mod io;
mod nodeset;
mod operators;
mod paths;

pub use baseline::{baseline_sets, BaselineRule};
pub use closure::{ergodic, reach_closure, reach_closure_within, return_closure};
pub use io::{parse_coord_table, read_graph_files, write_graph_files};
pub use nodeset::NodeSet;
pub use operators::{Classifier, ClassifierMode, LimitResult, SafeSetState};
pub use paths::{dijkstra, min_cost_path, Direction};

use crate::error::{GooseError, Result};

/// Directed graph over embedded decisions with positive edge costs.
#[derive(Clone, Debug)]
pub struct DecisionGraph {
    dim: usize,
    points: Vec<f64>,
    succ: Vec<Vec<(usize, f64)>>,
    pred: Vec<Vec<(usize, f64)>>,
}

impl DecisionGraph {
    /// Creates an edgeless graph; `points` holds `dim` coordinates per node.
    pub fn new(dim: usize, points: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.len() % dim != 0 {
            return Err(GooseError::invalid(format!(
                "{} coordinates cannot be split into {dim}-dimensional points",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(GooseError::invalid("non-finite node coordinate"));
        }
        let n = points.len() / dim;
        Ok(Self {
            dim,
            points,
            succ: vec![Vec::new(); n],
            pred: vec![Vec::new(); n],
        })
    }

    /// Same edges over a new embedding of the nodes.
    pub fn with_points(&self, dim: usize, points: Vec<f64>) -> Result<Self> {
        let fresh = Self::new(dim, points)?;
        if fresh.node_count() != self.node_count() {
            return Err(GooseError::DimensionMismatch {
                expected: self.node_count(),
                actual: fresh.node_count(),
            });
        }
        Ok(Self {
            succ: self.succ.clone(),
            pred: self.pred.clone(),
            ..fresh
        })
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, node: usize) -> &[f64] {
        &self.points[node * self.dim..(node + 1) * self.dim]
    }

    pub fn successors(&self, node: usize) -> &[(usize, f64)] {
        &self.succ[node]
    }

    pub fn predecessors(&self, node: usize) -> &[(usize, f64)] {
        &self.pred[node]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].iter().any(|&(v, _)| v == to)
    }

    /// Adds `from -> to`. Self-loops, duplicates and non-positive costs are
    /// rejected.
    pub fn add_edge(&mut self, from: usize, to: usize, cost: f64) -> Result<()> {
        let n = self.node_count();
        if from >= n || to >= n {
            return Err(GooseError::invalid(format!("edge {from}->{to} out of range ({n} nodes)")));
        }
        if from == to {
            return Err(GooseError::invalid(format!("self-loop at {from}")));
        }
        if !(cost > 0.0 && cost.is_finite()) {
            return Err(GooseError::invalid(format!("edge {from}->{to} has cost {cost}")));
        }
        if self.has_edge(from, to) {
            return Err(GooseError::invalid(format!("duplicate edge {from}->{to}")));
        }
        self.succ[from].push((to, cost));
        self.pred[to].push((from, cost));
        Ok(())
    }

    pub fn add_undirected(&mut self, a: usize, b: usize, cost: f64) -> Result<()> {
        self.add_edge(a, b, cost)?;
        self.add_edge(b, a, cost)
    }

    /// Bidirectional chain `0 <-> 1 <-> ... <-> m-1` on the points `0, spacing, ...`.
    pub fn chain(m: usize, spacing: f64) -> Result<Self> {
        let mut g = Self::new(1, (0..m).map(|i| i as f64 * spacing).collect())?;
        for i in 1..m {
            g.add_undirected(i - 1, i, 1.0)?;
        }
        Ok(g)
    }

    /// `w x h` lattice with 4-neighbour bidirectional unit edges.
    /// Node `(i, j)` (column, row) has index `j * w + i` and coordinates
    /// `(x0 + i * step, y0 + j * step)`.
    pub fn grid(w: usize, h: usize, origin: (f64, f64), step: f64) -> Result<Self> {
        let mut pts = Vec::with_capacity(2 * w * h);
        for j in 0..h {
            for i in 0..w {
                pts.push(origin.0 + i as f64 * step);
                pts.push(origin.1 + j as f64 * step);
            }
        }
        let mut g = Self::new(2, pts)?;
        for j in 0..h {
            for i in 0..w {
                let a = j * w + i;
                if i + 1 < w {
                    g.add_undirected(a, a + 1, 1.0)?;
                }
                if j + 1 < h {
                    g.add_undirected(a, a + w, 1.0)?;
                }
            }
        }
        Ok(g)
    }

    /// Every ordered pair of distinct nodes connected with unit cost.
    pub fn fully_connected(dim: usize, points: Vec<f64>) -> Result<Self> {
        let mut g = Self::new(dim, points)?;
        let n = g.node_count();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    g.add_edge(a, b, 1.0)?;
                }
            }
        }
        Ok(g)
    }
}
