use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use csv::{Terminator, Writer, WriterBuilder};

use super::config::{Algorithm, ExperimentKind};
use crate::error::Result;

/// Outcome of one (algorithm, seed, size) run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    /// Grid side for synthetic path worlds, 0 otherwise.
    pub size: usize,
    pub seed: usize,
    pub evaluations: usize,
    pub constraint_evals: usize,
    pub violations: usize,
    pub bounds_valid: bool,
    pub truncated: bool,
    pub stalls: usize,
    pub mean_step_time: Duration,
    pub total_time: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegretRecord {
    pub algorithm: Algorithm,
    pub seed: usize,
    pub instant: Vec<f64>,
    pub running_average: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathRecord {
    pub algorithm: Algorithm,
    pub size: usize,
    pub seed: usize,
    /// Constraint evaluations until the goal was certified.
    pub samples_to_first_path: Option<usize>,
    pub trajectory_cost: f64,
    pub constraint_evals: usize,
    pub set_sizes: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsReport {
    pub experiment: Option<ExperimentKind>,
    pub algorithms: Vec<Algorithm>,
    pub runs: Vec<RunSummary>,
    pub regret: Vec<RegretRecord>,
    pub paths: Vec<PathRecord>,
}

fn geometric_mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    Some((xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp())
}

impl MetricsReport {
    pub fn violation_count(&self) -> usize {
        self.runs.iter().map(|r| r.violations).sum()
    }

    pub fn is_safe(&self) -> bool {
        self.violation_count() == 0
    }

    /// Mean and standard error of the running-average regret per step.
    pub fn regret_summary(&self) -> Vec<(Algorithm, usize, f64, f64)> {
        let mut out = Vec::new();
        for &alg in &self.algorithms {
            let series: Vec<&Vec<f64>> = self
                .regret
                .iter()
                .filter(|r| r.algorithm == alg)
                .map(|r| &r.running_average)
                .collect();
            let steps = series.iter().map(|s| s.len()).max().unwrap_or(0);
            for step in 0..steps {
                let vals: Vec<f64> = series.iter().filter_map(|s| s.get(step).copied()).collect();
                let n = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / n;
                let var = if vals.len() > 1 {
                    vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
                } else {
                    0.0
                };
                out.push((alg, step + 1, mean, (var / n).sqrt()));
            }
        }
        out
    }

    /// Geometric mean over seeds of `metric(alg) / metric(smdp)` per
    /// algorithm and grid size, using only seeds where both values exist
    /// and are positive. `None` when no seed qualifies or smdp did not run.
    pub fn ratio_to_smdp<F>(&self, metric: F) -> Vec<(Algorithm, usize, Option<f64>)>
    where
        F: Fn(&PathRecord) -> Option<f64>,
    {
        let mut base: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for p in self.paths.iter().filter(|p| p.algorithm == Algorithm::Smdp) {
            if let Some(v) = metric(p) {
                base.insert((p.size, p.seed), v);
            }
        }
        let mut sizes: Vec<usize> = self.paths.iter().map(|p| p.size).collect();
        sizes.sort_unstable();
        sizes.dedup();
        let mut out = Vec::new();
        for &alg in &self.algorithms {
            for &size in &sizes {
                let ratios: Vec<f64> = self
                    .paths
                    .iter()
                    .filter(|p| p.algorithm == alg && p.size == size)
                    .filter_map(|p| {
                        let b = base.get(&(size, p.seed))?;
                        let v = metric(p)?;
                        (v > 0.0 && *b > 0.0).then(|| v / b)
                    })
                    .collect();
                out.push((alg, size, geometric_mean(&ratios)));
            }
        }
        out
    }

    pub fn samples_ratio(&self) -> Vec<(Algorithm, usize, Option<f64>)> {
        self.ratio_to_smdp(|p| p.samples_to_first_path.map(|s| s.max(1) as f64))
    }

    pub fn cost_ratio(&self) -> Vec<(Algorithm, usize, Option<f64>)> {
        self.ratio_to_smdp(|p| p.samples_to_first_path.map(|_| p.trajectory_cost))
    }
}

fn writer(path: &Path) -> Result<Writer<std::fs::File>> {
    Ok(WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_path(path)?)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

/// Writes the report's CSV files into `dir` and returns their paths.
///
/// Always: `runs.csv`. BO experiments: `regret.csv` (one row per algorithm,
/// seed and step) and `regret_summary.csv`. Path experiments: `paths.csv`,
/// `path_steps.csv` (set sizes per step) and `paths_summary.csv`. Wall
/// times are left out so that reruns produce identical files.
pub fn emit_csv(report: &MetricsReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let path = dir.join("runs.csv");
    let mut w = writer(&path)?;
    w.write_record([
        "algorithm",
        "size",
        "seed",
        "evaluations",
        "constraint_evals",
        "violations",
        "bounds_valid",
        "truncated",
        "stalls",
    ])?;
    for r in &report.runs {
        w.write_record([
            r.algorithm.to_string(),
            r.size.to_string(),
            r.seed.to_string(),
            r.evaluations.to_string(),
            r.constraint_evals.to_string(),
            r.violations.to_string(),
            r.bounds_valid.to_string(),
            r.truncated.to_string(),
            r.stalls.to_string(),
        ])?;
    }
    w.flush()?;
    written.push(path);

    let bo = report.experiment.is_none_or(|e| e.is_bo());
    if bo {
        let path = dir.join("regret.csv");
        let mut w = writer(&path)?;
        w.write_record(["algorithm", "seed", "step", "regret", "running_average"])?;
        for r in &report.regret {
            for (i, (a, b)) in r.instant.iter().zip(&r.running_average).enumerate() {
                w.write_record([
                    r.algorithm.to_string(),
                    r.seed.to_string(),
                    (i + 1).to_string(),
                    a.to_string(),
                    b.to_string(),
                ])?;
            }
        }
        w.flush()?;
        written.push(path);

        let path = dir.join("regret_summary.csv");
        let mut w = writer(&path)?;
        w.write_record(["algorithm", "step", "mean_running_average", "stderr"])?;
        for (alg, step, mean, se) in report.regret_summary() {
            w.write_record([alg.to_string(), step.to_string(), mean.to_string(), se.to_string()])?;
        }
        w.flush()?;
        written.push(path);
    }
    if !bo {
        let path = dir.join("paths.csv");
        let mut w = writer(&path)?;
        w.write_record([
            "algorithm",
            "size",
            "seed",
            "samples_to_first_path",
            "trajectory_cost",
            "constraint_evals",
        ])?;
        for p in &report.paths {
            w.write_record([
                p.algorithm.to_string(),
                p.size.to_string(),
                p.seed.to_string(),
                opt(p.samples_to_first_path),
                p.trajectory_cost.to_string(),
                p.constraint_evals.to_string(),
            ])?;
        }
        w.flush()?;
        written.push(path);

        let path = dir.join("path_steps.csv");
        let mut w = writer(&path)?;
        w.write_record(["algorithm", "size", "seed", "step", "pess_size", "opt_size"])?;
        for p in &report.paths {
            for (i, (ps, os)) in p.set_sizes.iter().enumerate() {
                w.write_record([
                    p.algorithm.to_string(),
                    p.size.to_string(),
                    p.seed.to_string(),
                    i.to_string(),
                    ps.to_string(),
                    os.to_string(),
                ])?;
            }
        }
        w.flush()?;
        written.push(path);

        let path = dir.join("paths_summary.csv");
        let mut w = writer(&path)?;
        w.write_record(["algorithm", "size", "samples_ratio", "cost_ratio"])?;
        for ((alg, size, s), (_, _, c)) in report.samples_ratio().into_iter().zip(report.cost_ratio()) {
            w.write_record([alg.to_string(), size.to_string(), opt(s), opt(c)])?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// Writes per-run wall times (`timing.csv`) into `dir`.
pub fn write_timing_csv(report: &MetricsReport, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("timing.csv");
    let mut w = writer(&path)?;
    w.write_record(["algorithm", "size", "seed", "mean_step_us", "total_ms"])?;
    for r in &report.runs {
        w.write_record([
            r.algorithm.to_string(),
            r.size.to_string(),
            r.seed.to_string(),
            format!("{:.3}", r.mean_step_time.as_secs_f64() * 1e6),
            format!("{:.3}", r.total_time.as_secs_f64() * 1e3),
        ])?;
    }
    w.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(alg: Algorithm, seed: usize, samples: Option<usize>) -> PathRecord {
        PathRecord {
            algorithm: alg,
            size: 10,
            seed,
            samples_to_first_path: samples,
            trajectory_cost: 1.0,
            constraint_evals: 0,
            set_sizes: vec![],
        }
    }

    #[test]
    fn smdp_ratio_is_one() {
        let report = MetricsReport {
            experiment: Some(ExperimentKind::SafePathSynthetic),
            algorithms: vec![Algorithm::Goose, Algorithm::Smdp],
            paths: vec![
                path(Algorithm::Goose, 0, Some(10)),
                path(Algorithm::Smdp, 0, Some(40)),
                path(Algorithm::Goose, 1, Some(10)),
                path(Algorithm::Smdp, 1, Some(10)),
                path(Algorithm::Goose, 2, None),
                path(Algorithm::Smdp, 2, Some(10)),
            ],
            ..MetricsReport::default()
        };
        let r = report.samples_ratio();
        assert_eq!(r[0], (Algorithm::Goose, 10, Some(0.5)));
        assert_eq!(r[1], (Algorithm::Smdp, 10, Some(1.0)));
    }

    #[test]
    fn empty_report_writes_headers() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_csv(&MetricsReport::default(), dir.path()).unwrap();
        for f in files {
            let text = std::fs::read_to_string(f).unwrap();
            assert_eq!(text.lines().count(), 1);
            assert!(text.ends_with('\n') && !text.contains('\r'));
        }
    }
}
