use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GooseError, Result};
use crate::gp::KernelSpec;

/// Deterministic generator used throughout the experiments.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Above this many points prior samples switch to random Fourier features.
pub(crate) const EXACT_SAMPLE_LIMIT: usize = 4000;
const FOURIER_FEATURES: usize = 2000;

/// Lower Cholesky factor of the prior covariance at `points`, with jitter
/// escalating from `1e-10` to `1e-4` times the variance.
fn prior_factor(kernel: &KernelSpec, dim: usize, points: &[f64]) -> Result<DMatrix<f64>> {
    let n = points.len() / dim;
    let p = |i: usize| &points[i * dim..(i + 1) * dim];
    let cov = DMatrix::from_fn(n, n, |i, j| kernel.eval_unchecked(p(i), p(j)));
    let mut jitter = 1e-10;
    while jitter <= 1e-4 {
        let mut k = cov.clone();
        for i in 0..n {
            k[(i, i)] += jitter * kernel.variance();
        }
        if let Some(ch) = k.cholesky() {
            return Ok(ch.l());
        }
        jitter *= 10.0;
    }
    Err(GooseError::Numerical("prior covariance not positive definite".into()))
}

/// Draws of a zero-mean GP at fixed points. The factorization is computed
/// once and reused for every draw.
pub(crate) struct PriorSampler {
    kind: SamplerKind,
}

enum SamplerKind {
    Exact(DMatrix<f64>),
    Fourier {
        kernel: KernelSpec,
        dim: usize,
        points: Vec<f64>,
    },
}

impl PriorSampler {
    pub(crate) fn new(kernel: &KernelSpec, dim: usize, points: &[f64]) -> Result<Self> {
        if dim == 0 || points.len() % dim != 0 {
            return Err(GooseError::invalid("point buffer does not match dimension"));
        }
        let n = points.len() / dim;
        let kind = if n <= EXACT_SAMPLE_LIMIT {
            SamplerKind::Exact(prior_factor(kernel, dim, points)?)
        } else {
            if kernel.family() != crate::gp::KernelFamily::Rbf {
                return Err(GooseError::invalid(format!(
                    "sampling {n} points needs an RBF kernel"
                )));
            }
            SamplerKind::Fourier {
                kernel: *kernel,
                dim,
                points: points.to_vec(),
            }
        };
        Ok(Self { kind })
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match &self.kind {
            SamplerKind::Exact(l) => {
                let z = DVector::from_fn(l.nrows(), |_, _| rng.sample::<f64, _>(StandardNormal));
                (l * z).iter().copied().collect()
            }
            SamplerKind::Fourier { kernel, dim, points } => {
                // f(x) = sqrt(2v/D) sum_i w_i cos(omega_i . x + b_i)
                let d = FOURIER_FEATURES;
                let omega: Vec<f64> = (0..d * dim)
                    .map(|_| rng.sample::<f64, _>(StandardNormal) / kernel.lengthscale())
                    .collect();
                let phase: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
                let weight: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let scale = (2.0 * kernel.variance() / d as f64).sqrt();
                points
                    .chunks(*dim)
                    .map(|x| {
                        let mut s = 0.0;
                        for i in 0..d {
                            let w = &omega[i * dim..(i + 1) * dim];
                            let arg: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + phase[i];
                            s += weight[i] * arg.cos();
                        }
                        scale * s
                    })
                    .collect()
            }
        }
    }
}

/// One draw of a zero-mean GP at `points` (row-major, `dim` per point).
pub fn sample_gp_values<R: Rng>(kernel: &KernelSpec, dim: usize, points: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    Ok(PriorSampler::new(kernel, dim, points)?.draw(rng))
}
