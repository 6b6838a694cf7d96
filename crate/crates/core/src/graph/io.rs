//! Plain-text graph files.
//!
//! Edge list: one `u v cost` record per line. Node table: one
//! `id x1 ... xd [extra ...]` record per line. Fields are whitespace
//! separated; blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::DecisionGraph;
use crate::error::{GooseError, Result};

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

fn num<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| GooseError::parse(line, format!("invalid {what} `{field}`")))
}

/// Parses a node table whose last `extra` columns are per-node values.
///
/// Returns the coordinate dimension, the row-major coordinates ordered by
/// node id, and the extra columns (row-major, `extra` per node).
pub fn parse_coord_table(text: &str, extra: usize) -> Result<(usize, Vec<f64>, Vec<f64>)> {
    let mut rows: Vec<(usize, usize, Vec<f64>)> = Vec::new();
    let mut width = None;
    for (line, fields) in records(text) {
        if fields.len() < 2 + extra {
            return Err(GooseError::parse(line, "node record needs an id and coordinates"));
        }
        if *width.get_or_insert(fields.len()) != fields.len() {
            return Err(GooseError::parse(line, "inconsistent number of columns"));
        }
        let id: usize = num(line, fields[0], "node id")?;
        let vals = fields[1..]
            .iter()
            .map(|f| {
                let v: f64 = num(line, f, "number")?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(GooseError::parse(line, format!("non-finite value `{f}`")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((id, line, vals));
    }
    let n = rows.len();
    if n == 0 {
        return Err(GooseError::parse(0, "empty node table"));
    }
    let dim = width.unwrap_or(0) - 1 - extra;
    let mut slots: Vec<Option<Vec<f64>>> = vec![None; n];
    for (id, line, vals) in rows {
        if id >= n {
            return Err(GooseError::parse(line, format!("node id {id} is not in 0..{n}")));
        }
        if slots[id].replace(vals).is_some() {
            return Err(GooseError::parse(line, format!("duplicate node id {id}")));
        }
    }
    let mut coords = Vec::with_capacity(n * dim);
    let mut values = Vec::with_capacity(n * extra);
    for vals in slots.into_iter().flatten() {
        coords.extend_from_slice(&vals[..dim]);
        values.extend_from_slice(&vals[dim..]);
    }
    Ok((dim, coords, values))
}

impl DecisionGraph {
    /// Builds a graph from an edge list and a node table.
    pub fn parse(edges: &str, nodes: &str) -> Result<Self> {
        let (dim, coords, _) = parse_coord_table(nodes, 0)?;
        let mut g = DecisionGraph::new(dim, coords)?;
        for (line, fields) in records(edges) {
            if fields.len() != 3 {
                return Err(GooseError::parse(line, "edge record must be `u v cost`"));
            }
            let u: usize = num(line, fields[0], "node id")?;
            let v: usize = num(line, fields[1], "node id")?;
            let c: f64 = num(line, fields[2], "cost")?;
            g.add_edge(u, v, c)
                .map_err(|e| GooseError::parse(line, e.to_string()))?;
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for u in 0..self.node_count() {
            for &(v, c) in self.successors(u) {
                let _ = writeln!(out, "{u} {v} {c}");
            }
        }
        out
    }

    /// Node table; `values`, when given, is appended as one extra column.
    pub fn to_node_table(&self, values: Option<&[f64]>) -> String {
        let mut out = String::new();
        for i in 0..self.node_count() {
            let _ = write!(out, "{i}");
            for x in self.point(i) {
                let _ = write!(out, " {x}");
            }
            if let Some(v) = values {
                let _ = write!(out, " {}", v[i]);
            }
            out.push('\n');
        }
        out
    }
}

pub fn read_graph_files(edges: &Path, nodes: &Path) -> Result<DecisionGraph> {
    DecisionGraph::parse(&std::fs::read_to_string(edges)?, &std::fs::read_to_string(nodes)?)
}

pub fn write_graph_files(g: &DecisionGraph, edges: &Path, nodes: &Path, values: Option<&[f64]>) -> Result<()> {
    std::fs::write(edges, g.to_edge_list())?;
    std::fs::write(nodes, g.to_node_table(values))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = DecisionGraph::grid(3, 2, (0.0, 0.5), 0.25).unwrap();
        let h = DecisionGraph::parse(&g.to_edge_list(), &g.to_node_table(None)).unwrap();
        assert_eq!(h.node_count(), g.node_count());
        assert_eq!(h.points(), g.points());
        assert_eq!(h.to_edge_list(), g.to_edge_list());
    }

    #[test]
    fn values_column() {
        let g = DecisionGraph::chain(3, 1.0).unwrap();
        let table = g.to_node_table(Some(&[0.5, -1.0, 2.0]));
        let (dim, coords, q) = parse_coord_table(&table, 1).unwrap();
        assert_eq!(dim, 1);
        assert_eq!(coords, vec![0.0, 1.0, 2.0]);
        assert_eq!(q, vec![0.5, -1.0, 2.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let nodes = "# header\n0 0.0\n1 1.0\n";
        let err = DecisionGraph::parse("0 1 1\n1 0 x\n", nodes).unwrap_err();
        assert!(matches!(err, GooseError::Parse { line: 2, .. }), "{err}");
        let err = DecisionGraph::parse("0 1 1\n", "0 0.0\n0 1.0\n").unwrap_err();
        assert!(matches!(err, GooseError::Parse { line: 2, .. }));
        let err = DecisionGraph::parse("", "0 0.0\n1 1.0 2.0\n").unwrap_err();
        assert!(matches!(err, GooseError::Parse { line: 2, .. }));
        let err = DecisionGraph::parse("0 5 1\n", nodes).unwrap_err();
        assert!(matches!(err, GooseError::Parse { line: 1, .. }));
    }
}
