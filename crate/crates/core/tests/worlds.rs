//! World generators, terrain constraints, heuristics and regret.

use std::path::PathBuf;

use goose_core::engine::{EvalKind, Evaluation, Heuristic, HeuristicContext, RunTrace};
use goose_core::gp::KernelSpec;
use goose_core::graph::{baseline_sets, BaselineRule, DecisionGraph, NodeSet};
use goose_core::worlds::{
    epsilon_safe_regret, load_heightmap, parse_heightmap, sample_gp_values, sample_gp_world, sample_grid_world,
    seeded_rng, transition_graph, EdgeCost, GoalDistanceHeuristic, GridOptions, HeightWorld, PathHeuristic,
};
use proptest::prelude::*;

fn terrain_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/terrain.txt")
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn prior_samples_have_zero_mean() {
    let k = KernelSpec::rbf(0.1, 1.0).unwrap();
    let xs: Vec<f64> = (0..12).map(|i| -1.0 + 2.0 * i as f64 / 11.0).collect();
    let mut rng = seeded_rng(2024);
    let draws: Vec<Vec<f64>> = (0..400).map(|_| sample_gp_values(&k, 1, &xs, &mut rng).unwrap()).collect();
    for node in 0..xs.len() {
        let column: Vec<f64> = draws.iter().map(|d| d[node]).collect();
        let (mean, se) = mean_and_stderr(&column);
        assert!(mean.abs() <= 3.0 * se, "node {node}: mean {mean} stderr {se}");
    }
}

#[test]
fn grid_constraint_is_centred_on_prior_mean() {
    let opts = GridOptions::synthetic(5, 5);
    let mut rng = seeded_rng(7);
    let world_means: Vec<f64> = (0..200)
        .map(|_| {
            let w = sample_grid_world(&opts, &mut rng).unwrap();
            w.true_q.iter().sum::<f64>() / w.true_q.len() as f64
        })
        .collect();
    let (mean, se) = mean_and_stderr(&world_means);
    assert!((mean - 0.6).abs() <= 3.0 * se, "mean {mean} stderr {se}");
}

#[test]
fn one_dimensional_world_defaults() {
    let k = KernelSpec::rbf(0.1, 1.0).unwrap();
    let w = sample_gp_world(1, k, 200, 0.01, &mut seeded_rng(0)).unwrap();
    assert_eq!(w.graph.node_count(), 200);
    assert_eq!(w.kernel.lengthscale(), 0.1);
    assert_eq!(w.kernel.variance(), 1.0);
    assert_eq!(w.noise_std, 0.01);
    assert_eq!(w.true_f, w.true_q);
    let s = w.seed.to_vec();
    assert_eq!(s.len(), 1);
    assert!(w.true_q[s[0]] >= 0.2);
}

#[test]
fn large_grids_are_supported() {
    let w = sample_grid_world(&GridOptions::synthetic(20, 20), &mut seeded_rng(1)).unwrap();
    assert_eq!(w.graph.node_count(), 4 * 20 * 19);
    let (g, moves) = transition_graph(90, 90, 1.0).unwrap();
    assert_eq!(g.node_count(), 4 * 90 * 89);
    assert_eq!(moves.len(), g.node_count());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn grid_worlds_are_symmetric_and_reproducible(seed in 0u64..100_000, side in 4usize..8) {
        let opts = GridOptions::synthetic(side, side);
        let a = sample_grid_world(&opts, &mut seeded_rng(seed)).unwrap();
        let b = sample_grid_world(&opts, &mut seeded_rng(seed)).unwrap();
        prop_assert_eq!(&a.true_q, &b.true_q);
        prop_assert_eq!(a.goal, b.goal);
        prop_assert_eq!(&a.seed, &b.seed);
        for (i, &(from, to)) in a.moves.iter().enumerate() {
            let rev = a.moves.iter().position(|&m| m == (to, from)).unwrap();
            prop_assert_eq!(a.true_q[i].to_bits(), a.true_q[rev].to_bits());
        }
        // goal enters the target and lies in the ground-truth region
        prop_assert_eq!(a.moves[a.goal].1, a.target);
        let region = baseline_sets(&a.graph, &a.true_q, &a.seed, BaselineRule::Direct, opts.epsilon).unwrap();
        prop_assert!(region.contains(a.goal));
        for s in a.seed.iter() {
            prop_assert!(a.true_q[s] >= opts.min_seed_q);
        }
    }
}

#[test]
fn ramp_transitions_match_hand_computation() {
    // rows at 0 m, 4 m and 10 m; 10 m cells; 25 degree limit
    let text = "0 0 0\n4 4 4\n10 10 10\n";
    let (w, h, heights) = parse_heightmap(text).unwrap();
    let terrain = HeightWorld::new(w, h, heights, 10.0, 25.0).unwrap();
    let flat = 0.466_307_658_154_998_6;
    let (_, moves) = transition_graph(3, 3, 10.0).unwrap();
    let mut safe = 0;
    for &(a, b) in &moves {
        let expected = match (a / 3, b / 3) {
            (r, s) if r == s => flat,
            (0, 1) | (1, 0) => flat - 0.4,
            _ => flat - 0.6,
        };
        let q = terrain.slope_feature(a, b);
        assert!((q - expected).abs() < 1e-12, "{a}->{b}: {q} vs {expected}");
        if q >= 0.0 {
            safe += 1;
        }
    }
    assert_eq!(moves.len(), 24);
    assert_eq!(safe, 18);
}

#[test]
fn loaded_terrain_matches_slope_formula_everywhere() {
    let terrain = load_heightmap(&terrain_path()).unwrap();
    assert_eq!((terrain.width, terrain.height), (20, 20));
    let opts = terrain.options(0.1 * 10f64.to_radians().tan());
    let world = terrain.world(&opts, &mut seeded_rng(3)).unwrap();
    let limit = 25f64.to_radians().tan();
    for (i, &(a, b)) in world.moves.iter().enumerate() {
        let expected = limit - (terrain.heights[a] - terrain.heights[b]).abs() / 10.0;
        assert_eq!(world.true_q[i], expected);
        assert_eq!(world.true_q[i] >= 0.0, (terrain.heights[a] - terrain.heights[b]).abs() <= 10.0 * limit);
    }
    let again = terrain.world(&opts, &mut seeded_rng(3)).unwrap();
    assert_eq!((world.goal, world.seed.to_vec()), (again.goal, again.seed.to_vec()));
}

#[test]
fn path_heuristic_prefers_the_straight_line() {
    // 5×5 lattice, node (i, j) = 5 j + i; safe set is the single cell (0, 2)
    let g = DecisionGraph::grid(5, 5, (0.0, 0.0), 1.0).unwrap();
    let (start, goal) = (10, 14);
    let pess = NodeSet::from_indices(25, [start]);
    let opt = NodeSet::full(25);
    let ctx = HeuristicContext { graph: &g, pess: &pess, opt: &opt, goal };
    let kappa = 1.5;
    let h = PathHeuristic { start: vec![start], kappa };
    let all: Vec<usize> = (0..25).collect();
    let got = h.priorities(&all, &ctx);
    let manhattan = |a: usize, b: usize| ((a % 5).abs_diff(b % 5) + (a / 5).abs_diff(b / 5)) as f64;
    for x in 0..25 {
        let expected = if manhattan(x, start) == 1.0 { -kappa * manhattan(x, goal) } else { f64::NEG_INFINITY };
        assert_eq!(got[x], expected, "node {x}");
    }
    let best = (0..25).max_by(|&a, &b| got[a].total_cmp(&got[b])).unwrap();
    assert_eq!(best, 11);
    assert_eq!(got.iter().filter(|&&p| p == got[11]).count(), 1);
}

#[test]
fn corridor_nodes_outrank_off_corridor_nodes() {
    let kernel = KernelSpec::rbf(0.2, 1.0).unwrap();
    let step = 1.0 / 9.0;
    let g = DecisionGraph::grid(10, 10, (0.0, 0.0), step).unwrap();
    let (start, goal) = (50, 59);
    let full = NodeSet::full(100);
    let ctx = HeuristicContext { graph: &g, pess: &full, opt: &full, goal };
    let h = GoalDistanceHeuristic { edges: EdgeCost::Metric(kernel) };
    let all: Vec<usize> = (0..100).collect();
    let got = h.priorities(&all, &ctx);
    let edge = (2.0 - 2.0 * (-step * step / (2.0 * 0.04)).exp()).sqrt();
    let manhattan = |a: usize, b: usize| ((a % 10).abs_diff(b % 10) + (a / 10).abs_diff(b / 10)) as f64;
    for x in 0..100 {
        assert!((got[x] + edge * manhattan(x, goal)).abs() < 1e-9);
    }
    assert_eq!(got[goal], 0.0);
    let on_corridor = |x: usize| manhattan(start, x) + manhattan(x, goal) == manhattan(start, goal);
    for x in (0..100).filter(|&x| on_corridor(x)) {
        for y in (0..100).filter(|&y| !on_corridor(y) && manhattan(start, y) == manhattan(start, x)) {
            assert!(got[x] > got[y], "{x} vs {y}");
        }
    }
}

#[test]
fn regret_vanishes_at_the_safe_optimum() {
    let k = KernelSpec::rbf(0.1, 1.0).unwrap();
    let w = sample_gp_world(1, k, 200, 0.01, &mut seeded_rng(4)).unwrap();
    let region = baseline_sets(&w.graph, &w.true_q, &w.seed, BaselineRule::Direct, 0.1).unwrap();
    let best = region.iter().max_by(|&a, &b| w.true_f[a].total_cmp(&w.true_f[b])).unwrap();
    let eval = |node: usize| Evaluation {
        kind: EvalKind::Objective,
        node,
        value: Some(w.true_f[node]),
        true_q: w.true_q[node],
    };
    let trace = RunTrace {
        evaluations: (0..200).map(eval).chain([eval(best)]).collect(),
        ..RunTrace::default()
    };
    let r = epsilon_safe_regret(&w, &trace, 0.1).unwrap();
    assert_eq!(r.optimum, w.true_f[best]);
    assert_eq!(*r.instant.last().unwrap(), 0.0);
    assert!(r.instant.iter().all(|&x| x >= 0.0));
    for (i, avg) in r.running_average.iter().enumerate() {
        let direct = r.instant[..=i].iter().sum::<f64>() / (i + 1) as f64;
        assert!((avg - direct).abs() < 1e-12);
    }
}
