use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::engine::GooseConfig;
use crate::error::{GooseError, Result};
use crate::gp::BetaSchedule;
use crate::graph::ClassifierMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    SafeBo1d,
    SafeBo2d,
    SafePathSynthetic,
    SafePathHeightmap,
}

impl ExperimentKind {
    pub fn is_bo(self) -> bool {
        matches!(self, ExperimentKind::SafeBo1d | ExperimentKind::SafeBo2d)
    }
}

impl FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "safe-bo-1d" => Ok(Self::SafeBo1d),
            "safe-bo-2d" => Ok(Self::SafeBo2d),
            "safe-path-synthetic" => Ok(Self::SafePathSynthetic),
            "safe-path-heightmap" => Ok(Self::SafePathHeightmap),
            _ => Err(format!("unknown experiment {s:?}")),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SafeBo1d => "safe-bo-1d",
            Self::SafeBo2d => "safe-bo-2d",
            Self::SafePathSynthetic => "safe-path-synthetic",
            Self::SafePathHeightmap => "safe-path-heightmap",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    Goose,
    SafeOpt,
    StageOpt,
    Smdp,
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "goose" => Ok(Self::Goose),
            "safeopt" => Ok(Self::SafeOpt),
            "stageopt" => Ok(Self::StageOpt),
            "smdp" => Ok(Self::Smdp),
            _ => Err(format!("unknown algorithm {s:?}")),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Goose => "goose",
            Self::SafeOpt => "safeopt",
            Self::StageOpt => "stageopt",
            Self::Smdp => "smdp",
        })
    }
}

/// `beta = <number>` or `beta = theoretical`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaSetting {
    Constant(f64),
    Theoretical,
}

/// Fully resolved experiment description; every field has a value after
/// parsing, so serializing and re-parsing is lossless.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub algorithms: Vec<Algorithm>,
    pub seeds: usize,
    pub master_seed: u64,
    /// Evaluations for BO, constraint evaluations for path planning.
    pub budget: usize,
    pub epsilon: f64,
    pub beta: BetaSetting,
    pub rkhs_bound: f64,
    pub delta: f64,
    pub mode: ClassifierMode,
    pub lipschitz: Option<f64>,
    pub kappa: f64,
    /// StageOpt switch point.
    pub stage_split: usize,
    pub lengthscale: f64,
    pub variance: f64,
    pub noise_std: f64,
    /// Grid points of BO worlds.
    pub points: usize,
    /// Sides of the synthetic square grid worlds.
    pub sizes: Vec<usize>,
    pub heightmap: Option<PathBuf>,
    pub grid_step: f64,
    pub slope_threshold: f64,
}

const KEYS: &[&str] = &[
    "experiment",
    "algorithms",
    "seeds",
    "master_seed",
    "budget",
    "epsilon",
    "beta",
    "rkhs_bound",
    "delta",
    "mode",
    "lipschitz",
    "kappa",
    "stage_split",
    "lengthscale",
    "variance",
    "noise_std",
    "points",
    "sizes",
    "heightmap",
    "grid_step",
    "slope_threshold",
];

impl ExperimentConfig {
    /// Desk-scale defaults for `experiment`.
    pub fn defaults(experiment: ExperimentKind) -> Self {
        use ExperimentKind::*;
        let (algorithms, seeds, budget, lengthscale, variance, points) = match experiment {
            SafeBo1d => (vec![Algorithm::Goose, Algorithm::SafeOpt, Algorithm::StageOpt], 10, 150, 0.1, 1.0, 200),
            SafeBo2d => (vec![Algorithm::Goose, Algorithm::SafeOpt, Algorithm::StageOpt], 5, 150, 0.4, 1.0, 625),
            SafePathSynthetic => (vec![Algorithm::Goose, Algorithm::Smdp], 10, 2000, 2.0, 1.0, 0),
            SafePathHeightmap => {
                let sd = 10f64.to_radians().tan();
                (vec![Algorithm::Goose, Algorithm::Smdp], 4, 2000, 30.0, sd * sd, 0)
            }
        };
        Self {
            experiment,
            algorithms,
            seeds,
            master_seed: 0,
            budget,
            epsilon: 0.1 * variance.sqrt(),
            beta: BetaSetting::Constant(3.0),
            rkhs_bound: 1.0,
            delta: 0.1,
            mode: ClassifierMode::Direct,
            lipschitz: None,
            kappa: 1.5,
            stage_split: budget / 2,
            lengthscale,
            variance,
            // slopes read off an elevation model are nearly exact
            noise_std: if experiment == SafePathHeightmap { 0.001 } else { 0.01 },
            points,
            sizes: vec![15],
            heightmap: None,
            grid_step: 10.0,
            slope_threshold: 25.0,
        }
    }

    /// Paper-scale seed counts and grid sizes.
    pub fn full_scale(&mut self) {
        match self.experiment {
            ExperimentKind::SafeBo1d => self.seeds = 40,
            ExperimentKind::SafeBo2d => self.seeds = 10,
            ExperimentKind::SafePathSynthetic => self.sizes = (2..=9).map(|k| 10 * k).collect(),
            ExperimentKind::SafePathHeightmap => {}
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GooseError::invalid(m));
        if self.budget == 0 {
            return bad("budget must be positive".into());
        }
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required".into());
        }
        if self.seeds == 0 {
            return bad("seeds must be positive".into());
        }
        if !self.experiment.is_bo() {
            if let Some(a) = self
                .algorithms
                .iter()
                .find(|a| matches!(a, Algorithm::SafeOpt | Algorithm::StageOpt))
            {
                return bad(format!("{a} needs an objective and only runs in BO experiments"));
            }
        }
        if self.experiment == ExperimentKind::SafePathHeightmap && self.heightmap.is_none() {
            return bad("safe-path-heightmap needs `heightmap = <file>`".into());
        }
        if self.experiment == ExperimentKind::SafePathSynthetic && self.sizes.iter().any(|&s| s < 3) {
            return bad("grid sizes must be at least 3".into());
        }
        self.goose_config().validate()
    }

    pub fn beta_schedule(&self) -> BetaSchedule {
        match self.beta {
            BetaSetting::Constant(v) => BetaSchedule::Constant(v),
            BetaSetting::Theoretical => BetaSchedule::Theoretical {
                rkhs_bound: self.rkhs_bound,
                delta: self.delta,
                noise_std: self.noise_std,
            },
        }
    }

    /// Engine settings shared by every run of the experiment.
    pub fn goose_config(&self) -> GooseConfig {
        GooseConfig {
            epsilon: self.epsilon,
            beta: self.beta_schedule(),
            mode: self.mode,
            lipschitz: self.lipschitz,
            kappa: self.kappa,
            max_constraint_evals: self.budget,
            max_evaluations: self.experiment.is_bo().then_some(self.budget),
            rng_seed: self.master_seed,
            objective_updates_constraint: self.experiment.is_bo(),
            ..GooseConfig::default()
        }
    }

    /// Serializes every key; `parse_config` of the output gives `self` back.
    pub fn to_config_string(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("experiment", self.experiment.to_string());
        put("algorithms", join(self.algorithms.iter().map(|a| a.to_string()).collect()));
        put("seeds", self.seeds.to_string());
        put("master_seed", self.master_seed.to_string());
        put("budget", self.budget.to_string());
        put("epsilon", self.epsilon.to_string());
        put(
            "beta",
            match self.beta {
                BetaSetting::Constant(v) => v.to_string(),
                BetaSetting::Theoretical => "theoretical".into(),
            },
        );
        put("rkhs_bound", self.rkhs_bound.to_string());
        put("delta", self.delta.to_string());
        put(
            "mode",
            match self.mode {
                ClassifierMode::Direct => "direct".into(),
                ClassifierMode::Lipschitz => "lipschitz".into(),
            },
        );
        put("lipschitz", self.lipschitz.map_or("none".into(), |l| l.to_string()));
        put("kappa", self.kappa.to_string());
        put("stage_split", self.stage_split.to_string());
        put("lengthscale", self.lengthscale.to_string());
        put("variance", self.variance.to_string());
        put("noise_std", self.noise_std.to_string());
        put("points", self.points.to_string());
        put("sizes", join(self.sizes.iter().map(|s| s.to_string()).collect()));
        put(
            "heightmap",
            self.heightmap.as_ref().map_or("none".into(), |p| p.display().to_string()),
        );
        put("grid_step", self.grid_step.to_string());
        put("slope_threshold", self.slope_threshold.to_string());
        out
    }
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| GooseError::parse(line, format!("invalid value {raw:?} for `{key}`")))
}

fn list<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| value(line, key, s))
        .collect()
}

fn positive(line: usize, key: &str, raw: &str) -> Result<f64> {
    let v: f64 = value(line, key, raw)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(GooseError::parse(line, format!("`{key}` must be positive")));
    }
    Ok(v)
}

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and bad
/// values are errors carrying the line number; a repeated key overrides the
/// earlier one with a warning. Omitted keys take the experiment's defaults,
/// with `epsilon` defaulting to `0.1 * sqrt(variance)`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| GooseError::parse(line, format!("expected `key = value`, found {content:?}")))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(GooseError::parse(line, format!("unknown key `{k}`")));
        }
        if let Some(prev) = entries.iter().position(|(_, pk, _)| pk == k) {
            log::warn!("line {line}: `{k}` overrides line {}", entries[prev].0);
            entries.remove(prev);
        }
        entries.push((line, k.to_string(), v.to_string()));
    }
    let (line, _, raw) = entries
        .iter()
        .find(|(_, k, _)| k == "experiment")
        .ok_or_else(|| GooseError::invalid("missing required key `experiment`"))?;
    let kind: ExperimentKind = raw.parse().map_err(|e: String| GooseError::parse(*line, e))?;
    let mut cfg = ExperimentConfig::defaults(kind);
    let mut epsilon_set = false;
    let mut split_set = false;
    for (line, k, v) in &entries {
        let line = *line;
        let v = v.as_str();
        match k.as_str() {
            "experiment" => {}
            "algorithms" => {
                let mut algs: Vec<Algorithm> = list(line, k, v)?;
                algs.dedup();
                cfg.algorithms = algs;
            }
            "seeds" => cfg.seeds = value(line, k, v)?,
            "master_seed" => cfg.master_seed = value(line, k, v)?,
            "budget" => cfg.budget = value(line, k, v)?,
            "epsilon" => {
                cfg.epsilon = positive(line, k, v)?;
                epsilon_set = true;
            }
            "beta" => {
                cfg.beta = if v == "theoretical" {
                    BetaSetting::Theoretical
                } else {
                    BetaSetting::Constant(positive(line, k, v)?)
                }
            }
            "rkhs_bound" => cfg.rkhs_bound = positive(line, k, v)?,
            "delta" => {
                let d: f64 = value(line, k, v)?;
                if !(d > 0.0 && d < 1.0) {
                    return Err(GooseError::parse(line, "`delta` must lie in (0, 1)"));
                }
                cfg.delta = d;
            }
            "mode" => {
                cfg.mode = match v {
                    "direct" => ClassifierMode::Direct,
                    "lipschitz" => ClassifierMode::Lipschitz,
                    _ => return Err(GooseError::parse(line, format!("unknown mode {v:?}"))),
                }
            }
            "lipschitz" => cfg.lipschitz = if v == "none" { None } else { Some(positive(line, k, v)?) },
            "kappa" => cfg.kappa = value(line, k, v)?,
            "stage_split" => {
                cfg.stage_split = value(line, k, v)?;
                split_set = true;
            }
            "lengthscale" => cfg.lengthscale = positive(line, k, v)?,
            "variance" => cfg.variance = positive(line, k, v)?,
            "noise_std" => cfg.noise_std = positive(line, k, v)?,
            "points" => cfg.points = value(line, k, v)?,
            "sizes" => cfg.sizes = list(line, k, v)?,
            "heightmap" => cfg.heightmap = if v == "none" { None } else { Some(PathBuf::from(v)) },
            "grid_step" => cfg.grid_step = positive(line, k, v)?,
            "slope_threshold" => cfg.slope_threshold = positive(line, k, v)?,
            _ => unreachable!("key list checked above"),
        }
    }
    if !epsilon_set {
        cfg.epsilon = 0.1 * cfg.variance.sqrt();
    }
    if !split_set {
        cfg.stage_split = cfg.budget / 2;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a configuration file. Relative heightmap paths are
/// resolved against the file's directory.
pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = parse_config(&text)?;
    if let (Some(map), Some(dir)) = (cfg.heightmap.as_mut(), path.parent()) {
        if map.is_relative() {
            *map = dir.join(&*map);
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_beta() {
        let cfg = parse_config("experiment = safe-bo-1d\nbeta = 3 # default value\n").unwrap();
        assert_eq!(cfg.beta, BetaSetting::Constant(3.0));
        assert_eq!(cfg.beta_schedule(), BetaSchedule::Constant(3.0));
        assert_eq!(cfg.seeds, 10);
        assert_eq!(cfg.epsilon, 0.1);
        assert_eq!(cfg.stage_split, 75);
    }

    #[test]
    fn epsilon_follows_variance() {
        let cfg = parse_config("experiment = safe-bo-2d\nvariance = 4\n").unwrap();
        assert_eq!(cfg.epsilon, 0.2);
    }

    #[test]
    fn errors_carry_lines() {
        assert!(parse_config("").is_err());
        assert!(parse_config("# nothing\n\n").is_err());
        match parse_config("experiment = safe-bo-1d\n\nfoo = 1\n") {
            Err(GooseError::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_config("experiment = safe-bo-1d\nseeds = many\n") {
            Err(GooseError::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_config("experiment = safe-bo-1d\nno equals sign\n") {
            Err(GooseError::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_config("experiment = safe-path-synthetic\nalgorithms = safeopt\n").is_err());
        assert!(parse_config("experiment = safe-bo-1d\nbudget = 0\n").is_err());
    }

    #[test]
    fn duplicate_key_last_wins() {
        let cfg = parse_config("experiment = safe-bo-1d\nseeds = 3\nseeds = 4\n").unwrap();
        assert_eq!(cfg.seeds, 4);
    }

    #[test]
    fn round_trip() {
        let mut cfg = parse_config("experiment = safe-path-synthetic\nsizes = 10, 12\nepsilon = 0.123456789\n").unwrap();
        cfg.lipschitz = Some(0.1 + 0.2);
        let again = parse_config(&cfg.to_config_string()).unwrap();
        assert_eq!(again, cfg);
    }
}
