use crate::error::{GooseError, Result};
use crate::graph::NodeSet;

/// Scaling of the posterior standard deviation in the confidence bounds.
///
/// [`BetaSchedule::scale`] returns the multiplier applied to `sigma_t(x)`,
/// i.e. `beta_t^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaSchedule {
    /// Fixed multiplier for every `t`.
    Constant(f64),
    /// `B_q + 4 sigma sqrt(gamma_t + 1 + ln(1/delta))` with `gamma_t`
    /// supplied by the caller.
    Theoretical {
        rkhs_bound: f64,
        delta: f64,
        noise_std: f64,
    },
}

impl Default for BetaSchedule {
    fn default() -> Self {
        BetaSchedule::Constant(3.0)
    }
}

impl BetaSchedule {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(GooseError::invalid(format!("beta must be positive, got {value}")));
        }
        Ok(BetaSchedule::Constant(value))
    }

    pub fn theoretical(rkhs_bound: f64, delta: f64, noise_std: f64) -> Result<Self> {
        if !(rkhs_bound > 0.0 && noise_std > 0.0) {
            return Err(GooseError::invalid("B_q and noise std must be positive"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(GooseError::invalid(format!("delta must lie in (0, 1), got {delta}")));
        }
        Ok(BetaSchedule::Theoretical {
            rkhs_bound,
            delta,
            noise_std,
        })
    }

    /// Multiplier at step `t` given the information-gain estimate `gamma`.
    pub fn scale(&self, _t: usize, gamma: f64) -> f64 {
        match *self {
            BetaSchedule::Constant(v) => v,
            BetaSchedule::Theoretical {
                rkhs_bound,
                delta,
                noise_std,
            } => rkhs_bound + 4.0 * noise_std * (gamma.max(0.0) + 1.0 + (1.0 / delta).ln()).sqrt(),
        }
    }
}

/// Per-node confidence interval `[l_t(x), u_t(x)]`, intersected over time.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfidenceState {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ConfidenceState {
    /// `l_0 = 0` on the seed and `-inf` elsewhere; `u_0 = +inf`.
    pub fn new(n: usize, seed: &NodeSet) -> Self {
        let mut lower = vec![f64::NEG_INFINITY; n];
        for i in seed.iter() {
            lower[i] = 0.0;
        }
        Self {
            lower,
            upper: vec![f64::INFINITY; n],
        }
    }

    /// Builds a state from explicit bounds (useful for tests and replay).
    pub fn from_bounds(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(GooseError::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u || l.is_nan() || u.is_nan()) {
            return Err(GooseError::invalid("lower bound exceeds upper bound"));
        }
        Ok(Self { lower, upper })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, node: usize) -> f64 {
        self.upper[node] - self.lower[node]
    }

    /// Intersects the current intervals with `mean ± scale * sqrt(var)`.
    ///
    /// If a candidate interval is disjoint from the current one the node
    /// collapses onto the nearest end of the current interval, which keeps
    /// both monotonicity and `l <= u`.
    pub fn update(&mut self, means: &[f64], variances: &[f64], scale: f64) {
        for i in 0..self.lower.len() {
            let sd = variances[i].max(0.0).sqrt();
            let cand_lo = means[i] - scale * sd;
            let cand_hi = means[i] + scale * sd;
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if cand_lo > hi {
                self.lower[i] = hi;
            } else if cand_hi < lo {
                self.upper[i] = lo;
            } else {
                self.lower[i] = lo.max(cand_lo);
                self.upper[i] = hi.min(cand_hi);
            }
        }
    }

    /// Whether every interval contains the corresponding true value.
    pub fn contains_all(&self, truth: &[f64]) -> bool {
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(truth)
            .all(|((l, u), q)| l <= q && q <= u)
    }
}
