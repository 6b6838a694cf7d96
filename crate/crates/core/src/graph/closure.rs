//! Reachability, returnability and ergodicity closures.

use std::collections::VecDeque;

use super::{DecisionGraph, NodeSet};

/// Forward closure of `start` along edges whose head lies in `within`.
///
/// Nodes of `start` are always part of the result.
pub fn reach_closure_within(g: &DecisionGraph, within: &NodeSet, start: &NodeSet) -> NodeSet {
    let mut out = start.clone();
    let mut queue: VecDeque<usize> = start.iter().collect();
    while let Some(u) = queue.pop_front() {
        for &(v, _) in g.successors(u) {
            if within.contains(v) && out.insert(v) {
                queue.push_back(v);
            }
        }
    }
    out
}

/// Every node reachable from `s` in the whole graph (including `s`).
pub fn reach_closure(g: &DecisionGraph, s: &NodeSet) -> NodeSet {
    reach_closure_within(g, &NodeSet::full(g.node_count()), s)
}

/// `target` plus every node of `within` that reaches `target` along a path
/// whose nodes all lie in `within`.
pub fn return_closure(g: &DecisionGraph, within: &NodeSet, target: &NodeSet) -> NodeSet {
    let mut out = target.clone();
    let mut queue: VecDeque<usize> = target.iter().collect();
    while let Some(v) = queue.pop_front() {
        for &(u, _) in g.predecessors(v) {
            if within.contains(u) && out.insert(u) {
                queue.push_back(u);
            }
        }
    }
    out
}

/// Nodes of `s ∪ base` that can be reached from `base` and can return to
/// `base`, both through paths inside `s ∪ base`.
pub fn ergodic(g: &DecisionGraph, s: &NodeSet, base: &NodeSet) -> NodeSet {
    let region = s.union(base);
    let reach = reach_closure_within(g, &region, base);
    let ret = return_closure(g, s, base);
    reach.intersection(&ret)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn directed_chain(m: usize) -> DecisionGraph {
        let mut g = DecisionGraph::new(1, (0..m).map(|i| i as f64).collect()).unwrap();
        for i in 1..m {
            g.add_edge(i - 1, i, 1.0).unwrap();
        }
        g
    }

    #[test]
    fn reach_on_chain() {
        let g = directed_chain(5);
        let r = reach_closure(&g, &NodeSet::from_indices(5, [2]));
        assert_eq!(r.to_vec(), vec![2, 3, 4]);
        assert_eq!(reach_closure(&g, &NodeSet::full(5)), NodeSet::full(5));
    }

    #[test]
    fn reach_fully_connected() {
        let g = DecisionGraph::fully_connected(1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(reach_closure(&g, &NodeSet::from_indices(4, [3])), NodeSet::full(4));
    }

    #[test]
    fn return_on_chain() {
        let g = directed_chain(3);
        let all = NodeSet::full(3);
        let r = return_closure(&g, &all, &NodeSet::from_indices(3, [2]));
        assert_eq!(r, all);
        let empty = NodeSet::new(3);
        let t = NodeSet::from_indices(3, [1]);
        assert_eq!(return_closure(&g, &empty, &t), t);
        // node 2 has no edge back into {0, 1}
        let r = return_closure(&g, &all, &NodeSet::from_indices(3, [1]));
        assert_eq!(r.to_vec(), vec![0, 1]);
    }

    /// Six nodes: seed {0, 1}; 2 is certified and two-way connected; 3 is
    /// uncertified; 4 is only left through 3; 5 is only entered through 3.
    #[test]
    fn ergodic_excludes_unreachable_and_unreturnable() {
        let mut g = DecisionGraph::new(1, (0..6).map(|i| i as f64).collect()).unwrap();
        g.add_undirected(0, 1, 1.0).unwrap();
        g.add_undirected(1, 2, 1.0).unwrap();
        g.add_edge(2, 4, 1.0).unwrap();
        g.add_edge(4, 3, 1.0).unwrap();
        g.add_edge(3, 2, 1.0).unwrap();
        g.add_edge(3, 5, 1.0).unwrap();
        g.add_edge(5, 1, 1.0).unwrap();
        let candidates = NodeSet::from_indices(6, [0, 1, 2, 4, 5]);
        let base = NodeSet::from_indices(6, [0, 1]);
        let e = ergodic(&g, &candidates, &base);
        assert_eq!(e.to_vec(), vec![0, 1, 2]);
    }

    #[test]
    fn ergodic_degenerate_cases() {
        let g = DecisionGraph::fully_connected(1, vec![0.0, 1.0, 2.0]).unwrap();
        let s = NodeSet::from_indices(3, [1, 2]);
        assert_eq!(ergodic(&g, &s, &NodeSet::new(3)), NodeSet::new(3));
        let base = NodeSet::from_indices(3, [0]);
        assert_eq!(ergodic(&g, &s, &base), s.union(&base));
    }
}
