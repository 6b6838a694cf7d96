use super::kernel::KernelSpec;
use crate::error::{GooseError, Result};
use crate::par;

/// Relative diagonal jitter used when a Cholesky pivot is not positive.
const JITTER: f64 = 1e-10;

/// Ordered noisy observations `(x_i, y_i)`.
#[derive(Clone, Debug, Default)]
pub struct ObservationLog {
    inputs: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl ObservationLog {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.inputs
            .iter()
            .map(Vec::as_slice)
            .zip(self.values.iter().copied())
    }

    fn push(&mut self, x: Vec<f64>, y: f64) {
        self.inputs.push(x);
        self.values.push(y);
    }
}

/// Lower-triangular Cholesky factor stored row by row (row `i` has `i + 1`
/// entries), grown one observation at a time.
#[derive(Clone, Debug, Default)]
struct PackedCholesky {
    rows: Vec<Vec<f64>>,
}

impl PackedCholesky {
    fn len(&self) -> usize {
        self.rows.len()
    }

    fn diag(&self, i: usize) -> f64 {
        self.rows[i][i]
    }

    /// Solves `L v = b` by forward substitution.
    fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(b.len());
        for (i, row) in self.rows.iter().enumerate() {
            let dot: f64 = row[..i].iter().zip(&v).map(|(a, b)| a * b).sum();
            v.push((b[i] - dot) / row[i]);
        }
        v
    }

    /// Appends the row for a new point with cross-covariances `cross` and
    /// prior variance `self_cov` (noise included). Returns `false` when the
    /// pivot is not positive.
    fn try_append(&mut self, cross: &[f64], self_cov: f64) -> bool {
        let mut row = self.forward(cross);
        let pivot = self_cov - row.iter().map(|v| v * v).sum::<f64>();
        if !(pivot > 0.0 && pivot.is_finite()) {
            return false;
        }
        row.push(pivot.sqrt());
        self.rows.push(row);
        true
    }
}

/// Exact GP posterior over arbitrary query points.
///
/// Holds the factorization of `K_t + sigma^2 I`, extended by one row per
/// observation; [`PosteriorModel::recompute`] rebuilds it from scratch.
#[derive(Clone, Debug)]
pub struct PosteriorModel {
    kernel: KernelSpec,
    noise_std: f64,
    prior_mean: f64,
    log: ObservationLog,
    chol: PackedCholesky,
    /// `L^{-1} (y - m)`.
    whitened: Vec<f64>,
    jitter: f64,
}

impl PosteriorModel {
    pub fn new(kernel: KernelSpec, noise_std: f64) -> Result<Self> {
        if !(noise_std > 0.0 && noise_std.is_finite()) {
            return Err(GooseError::invalid(format!(
                "noise std must be positive, got {noise_std}"
            )));
        }
        Ok(Self {
            kernel,
            noise_std,
            prior_mean: 0.0,
            log: ObservationLog::default(),
            chol: PackedCholesky::default(),
            whitened: Vec::new(),
            jitter: 0.0,
        })
    }

    /// Constant prior mean (zero unless set).
    pub fn with_prior_mean(mut self, mean: f64) -> Self {
        self.prior_mean = mean;
        self
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn log(&self) -> &ObservationLog {
        &self.log
    }

    pub fn len(&self) -> usize {
        self.log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log.is_empty()
    }

    fn noise_var(&self) -> f64 {
        self.noise_std * self.noise_std
    }

    /// Appends an observation and extends the factorization by one row.
    pub fn observe(&mut self, x: &[f64], y: f64) -> Result<()> {
        if let Some((first, _)) = self.log.iter().next() {
            if first.len() != x.len() {
                return Err(GooseError::DimensionMismatch {
                    expected: first.len(),
                    actual: x.len(),
                });
            }
        }
        let cross: Vec<f64> = self
            .log
            .iter()
            .map(|(xi, _)| self.kernel.eval_unchecked(xi, x))
            .collect();
        let self_cov = self.kernel.variance() + self.noise_var() + self.jitter;
        self.log.push(x.to_vec(), y);
        if self.chol.try_append(&cross, self_cov) {
            let t = self.chol.len() - 1;
            let row = &self.chol.rows[t];
            let dot: f64 = row[..t].iter().zip(&self.whitened).map(|(a, b)| a * b).sum();
            self.whitened
                .push((y - self.prior_mean - dot) / row[t]);
            return Ok(());
        }
        if self.jitter == 0.0 {
            self.jitter = JITTER * self.kernel.variance();
            if self.recompute().is_ok() {
                return Ok(());
            }
        }
        self.log.inputs.pop();
        self.log.values.pop();
        let _ = self.recompute();
        Err(GooseError::Numerical(
            "kernel matrix is not positive definite after jitter".into(),
        ))
    }

    /// Rebuilds the factorization from the full log.
    pub fn recompute(&mut self) -> Result<()> {
        let mut chol = PackedCholesky::default();
        let noise = self.noise_var() + self.jitter;
        for (i, xi) in self.log.inputs.iter().enumerate() {
            let cross: Vec<f64> = self.log.inputs[..i]
                .iter()
                .map(|xj| self.kernel.eval_unchecked(xj, xi))
                .collect();
            if !chol.try_append(&cross, self.kernel.variance() + noise) {
                return Err(GooseError::Numerical(format!(
                    "non-positive pivot at observation {i}"
                )));
            }
        }
        let centred: Vec<f64> = self.log.values.iter().map(|y| y - self.prior_mean).collect();
        self.whitened = chol.forward(&centred);
        self.chol = chol;
        Ok(())
    }

    /// Posterior means and variances at the query points.
    pub fn posterior_at(&self, points: &[&[f64]]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut means = Vec::with_capacity(points.len());
        let mut vars = Vec::with_capacity(points.len());
        for x in points {
            if let Some((first, _)) = self.log.iter().next() {
                if first.len() != x.len() {
                    return Err(GooseError::DimensionMismatch {
                        expected: first.len(),
                        actual: x.len(),
                    });
                }
            }
            let cross: Vec<f64> = self
                .log
                .iter()
                .map(|(xi, _)| self.kernel.eval_unchecked(xi, x))
                .collect();
            let v = self.chol.forward(&cross);
            let mean = self.prior_mean + v.iter().zip(&self.whitened).map(|(a, b)| a * b).sum::<f64>();
            let var = self.kernel.variance() - v.iter().map(|a| a * a).sum::<f64>();
            means.push(mean);
            vars.push(var.clamp(0.0, self.kernel.variance()));
        }
        Ok((means, vars))
    }

    /// `1/2 log det(I + sigma^-2 K_t)`.
    pub fn gamma_estimate(&self) -> f64 {
        (0..self.chol.len())
            .map(|i| (self.chol.diag(i) / self.noise_std).ln())
            .sum::<f64>()
            .max(0.0)
    }
}

/// Information-gain surrogate for the information capacity.
pub fn gamma_estimate(model: &PosteriorModel) -> f64 {
    model.gamma_estimate()
}

/// GP posterior tracked at every node of a fixed finite domain.
///
/// For each node `j` it keeps `v_j = L^{-1} k_t(x_j)`, so a new observation
/// costs one pass over the nodes (`O(N t)`) instead of a triangular solve
/// per node. Observations must be made at domain nodes.
#[derive(Clone, Debug)]
pub struct GraphPosterior {
    kernel: KernelSpec,
    noise_std: f64,
    prior_mean: f64,
    dim: usize,
    points: Vec<f64>,
    observed: Vec<usize>,
    values: Vec<f64>,
    proj: Vec<Vec<f64>>,
    means: Vec<f64>,
    vars: Vec<f64>,
    whitened: Vec<f64>,
    log_pivot_sum: f64,
}

impl GraphPosterior {
    /// `points` is row-major with `dim` coordinates per node.
    pub fn new(kernel: KernelSpec, noise_std: f64, prior_mean: f64, dim: usize, points: Vec<f64>) -> Result<Self> {
        if !(noise_std > 0.0 && noise_std.is_finite()) {
            return Err(GooseError::invalid(format!(
                "noise std must be positive, got {noise_std}"
            )));
        }
        if dim == 0 || points.len() % dim != 0 {
            return Err(GooseError::invalid("point buffer does not match dimension"));
        }
        let n = points.len() / dim;
        Ok(Self {
            kernel,
            noise_std,
            prior_mean,
            dim,
            points,
            observed: Vec::new(),
            values: Vec::new(),
            proj: vec![Vec::new(); n],
            means: vec![prior_mean; n],
            vars: vec![kernel.variance(); n],
            whitened: Vec::new(),
            log_pivot_sum: 0.0,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }

    pub fn node_count(&self) -> usize {
        self.means.len()
    }

    pub fn observation_count(&self) -> usize {
        self.observed.len()
    }

    pub fn observed_nodes(&self) -> &[usize] {
        &self.observed
    }

    pub fn observed_values(&self) -> &[f64] {
        &self.values
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn variances(&self) -> &[f64] {
        &self.vars
    }

    pub fn point(&self, node: usize) -> &[f64] {
        &self.points[node * self.dim..(node + 1) * self.dim]
    }

    pub fn gamma_estimate(&self) -> f64 {
        self.log_pivot_sum.max(0.0)
    }

    /// Conditions on `y` observed at `node`.
    pub fn observe(&mut self, node: usize, y: f64) -> Result<()> {
        let n = self.node_count();
        if node >= n {
            return Err(GooseError::invalid(format!("node {node} out of range ({n})")));
        }
        let noise_var = self.noise_std * self.noise_std;
        let mut pivot_sq = self.vars[node] + noise_var;
        if !(pivot_sq > 0.0 && pivot_sq.is_finite()) {
            pivot_sq += JITTER * self.kernel.variance();
            if !(pivot_sq > 0.0 && pivot_sq.is_finite()) {
                return Err(GooseError::Numerical(format!(
                    "non-positive pivot observing node {node}"
                )));
            }
        }
        let pivot = pivot_sq.sqrt();
        let row = self.proj[node].clone();
        let dot: f64 = row.iter().zip(&self.whitened).map(|(a, b)| a * b).sum();
        let alpha = (y - self.prior_mean - dot) / pivot;

        let kernel = self.kernel;
        let dim = self.dim;
        let points = &self.points;
        let xo = &points[node * dim..(node + 1) * dim];
        let work = n * (row.len() + dim + 1);
        par::for_each_node(
            &mut self.proj,
            &mut self.means,
            &mut self.vars,
            work,
            |j, proj, mean, var| {
                let xj = &points[j * dim..(j + 1) * dim];
                let cross = kernel.eval_unchecked(xj, xo);
                let dot: f64 = proj.iter().zip(&row).map(|(a, b)| a * b).sum();
                let v = (cross - dot) / pivot;
                proj.push(v);
                *mean += v * alpha;
                *var = (*var - v * v).max(0.0);
            },
        );
        self.whitened.push(alpha);
        self.observed.push(node);
        self.values.push(y);
        self.log_pivot_sum += (pivot / self.noise_std).ln();
        Ok(())
    }
}
