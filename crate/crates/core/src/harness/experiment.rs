use std::time::Instant;

use super::config::{Algorithm, ExperimentConfig, ExperimentKind};
use super::report::{MetricsReport, PathRecord, RegretRecord, RunSummary};
use crate::engine::{run, ModelSpec, RunTrace};
use crate::error::{GooseError, Result};
use crate::gp::KernelSpec;
use crate::oracles::{run_baseline, smdp_runner, BaselineKind, GoalOracle, UcbOracle};
use crate::par::{map_ordered, Parallelism};
use crate::worlds::{
    epsilon_safe_regret, load_heightmap, sample_gp_world, sample_grid_world, seeded_rng, BoWorld, EdgeCost,
    GoalDistanceHeuristic, GridMdpWorld, GridOptions, PathHeuristic,
};

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator seed of world `index` (and grid side `size`) under `master`.
pub fn world_seed(master: u64, index: usize, size: usize) -> u64 {
    splitmix(splitmix(master) ^ splitmix((index as u64) << 20 | size as u64))
}

enum World {
    Bo(BoWorld),
    Grid(GridMdpWorld),
}

struct Instance {
    seed: usize,
    size: usize,
    rng_seed: u64,
    world: World,
}

fn make_instances(cfg: &ExperimentConfig, par: Parallelism) -> Result<Vec<Instance>> {
    let kernel = KernelSpec::rbf(cfg.lengthscale, cfg.variance)?;
    let keys: Vec<(usize, usize)> = match cfg.experiment {
        ExperimentKind::SafePathSynthetic => (0..cfg.seeds)
            .flat_map(|s| cfg.sizes.iter().map(move |&z| (s, z)))
            .collect(),
        _ => (0..cfg.seeds).map(|s| (s, 0)).collect(),
    };
    let terrain = match (&cfg.experiment, &cfg.heightmap) {
        (ExperimentKind::SafePathHeightmap, Some(path)) => {
            let mut t = load_heightmap(path)?;
            t.step = cfg.grid_step;
            t.threshold_deg = cfg.slope_threshold;
            Some(t)
        }
        _ => None,
    };
    map_ordered(&keys, par, |&(seed, size)| {
        let rng_seed = world_seed(cfg.master_seed, seed, size);
        let mut rng = seeded_rng(rng_seed);
        let world = match cfg.experiment {
            ExperimentKind::SafeBo1d => World::Bo(sample_gp_world(1, kernel, cfg.points, cfg.noise_std, &mut rng)?),
            ExperimentKind::SafeBo2d => World::Bo(sample_gp_world(2, kernel, cfg.points, cfg.noise_std, &mut rng)?),
            ExperimentKind::SafePathSynthetic => {
                let opts = GridOptions {
                    kernel,
                    noise_std: cfg.noise_std,
                    epsilon: cfg.epsilon,
                    ..GridOptions::synthetic(size, size)
                };
                World::Grid(sample_grid_world(&opts, &mut rng)?)
            }
            ExperimentKind::SafePathHeightmap => {
                let t = terrain.as_ref().expect("validated heightmap");
                let opts = GridOptions {
                    kernel: KernelSpec::matern52(cfg.lengthscale, cfg.variance)?,
                    noise_std: cfg.noise_std,
                    ..t.options(cfg.epsilon)
                };
                World::Grid(t.world(&opts, &mut rng)?)
            }
        };
        Ok(Instance {
            seed,
            size,
            rng_seed,
            world,
        })
    })
    .into_iter()
    .collect()
}

enum Outcome {
    Bo(RunTrace, RegretRecord),
    Path(RunTrace, PathRecord),
}

fn run_job(cfg: &ExperimentConfig, inst: &Instance, alg: Algorithm) -> Result<(RunSummary, Outcome)> {
    let mut gcfg = cfg.goose_config();
    let env_seed = inst.rng_seed ^ 0x5EED;
    let started = Instant::now();
    let outcome = match &inst.world {
        World::Bo(w) => {
            let model = ModelSpec {
                kernel: w.kernel,
                noise_std: w.noise_std,
                prior_mean: 0.0,
            };
            let mut env = w.env(env_seed);
            let trace = match alg {
                Algorithm::Goose => {
                    let h = GoalDistanceHeuristic { edges: EdgeCost::Graph };
                    let mut oracle = UcbOracle::shared(gcfg.beta);
                    run(&w.graph, &w.seed, &model, &mut oracle, &h, &mut env, &gcfg)?
                }
                Algorithm::SafeOpt => run_baseline(&w.graph, &w.seed, &model, &mut env, &gcfg, BaselineKind::SafeOpt)?,
                Algorithm::StageOpt => run_baseline(
                    &w.graph,
                    &w.seed,
                    &model,
                    &mut env,
                    &gcfg,
                    BaselineKind::StageOpt { t1: cfg.stage_split },
                )?,
                Algorithm::Smdp => smdp_runner(&w.graph, &w.seed, &model, &mut env, &gcfg)?,
            };
            let regret = epsilon_safe_regret(w, &trace, cfg.epsilon)?;
            Outcome::Bo(
                trace,
                RegretRecord {
                    algorithm: alg,
                    seed: inst.seed,
                    instant: regret.instant,
                    running_average: regret.running_average,
                },
            )
        }
        World::Grid(w) => {
            gcfg.watch = Some(w.goal);
            gcfg.stop_on_watch = true;
            let mut env = w.env(env_seed);
            let trace = match alg {
                Algorithm::Goose => {
                    let h = PathHeuristic {
                        start: w.seed.to_vec(),
                        kappa: cfg.kappa,
                    };
                    run(&w.graph, &w.seed, &w.model, &mut GoalOracle::new(w.goal), &h, &mut env, &gcfg)?
                }
                Algorithm::Smdp => smdp_runner(&w.graph, &w.seed, &w.model, &mut env, &gcfg)?,
                other => {
                    return Err(GooseError::invalid(format!("{other} does not run on path worlds")));
                }
            };
            let record = PathRecord {
                algorithm: alg,
                size: inst.size,
                seed: inst.seed,
                samples_to_first_path: trace.watch_certified_at,
                trajectory_cost: trace.trajectory_cost,
                constraint_evals: trace.constraint_count(),
                set_sizes: trace.set_sizes.clone(),
            };
            Outcome::Path(trace, record)
        }
    };
    let elapsed = started.elapsed();
    let trace = match &outcome {
        Outcome::Bo(t, _) | Outcome::Path(t, _) => t,
    };
    let summary = RunSummary {
        algorithm: alg,
        size: inst.size,
        seed: inst.seed,
        evaluations: trace.evaluations.len(),
        constraint_evals: trace.constraint_count(),
        violations: trace.violations.len(),
        bounds_valid: trace.bounds_valid,
        truncated: trace.truncated,
        stalls: trace.stalls,
        mean_step_time: trace.mean_step_time(),
        total_time: elapsed,
    };
    Ok((summary, outcome))
}

/// Runs every seed and algorithm of `cfg` on the rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<MetricsReport> {
    run_experiment_with(cfg, Parallelism::Auto)
}

/// Runs every seed and algorithm of `cfg`. Runs are independent; the report
/// lists them in (seed, size, algorithm) order regardless of `par`.
pub fn run_experiment_with(cfg: &ExperimentConfig, par: Parallelism) -> Result<MetricsReport> {
    cfg.validate()?;
    let instances = make_instances(cfg, par)?;
    let jobs: Vec<(usize, Algorithm)> = (0..instances.len())
        .flat_map(|i| cfg.algorithms.iter().map(move |&a| (i, a)))
        .collect();
    let results = map_ordered(&jobs, par, |&(i, alg)| run_job(cfg, &instances[i], alg));
    let mut report = MetricsReport {
        experiment: Some(cfg.experiment),
        algorithms: cfg.algorithms.clone(),
        ..MetricsReport::default()
    };
    for r in results {
        let (summary, outcome) = r?;
        if summary.violations > 0 {
            log::warn!(
                "{} seed {} size {}: {} unsafe evaluations",
                summary.algorithm,
                summary.seed,
                summary.size,
                summary.violations
            );
        }
        report.runs.push(summary);
        match outcome {
            Outcome::Bo(_, r) => report.regret.push(r),
            Outcome::Path(_, p) => report.paths.push(p),
        }
    }
    Ok(report)
}
