use crate::error::{GooseError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelFamily {
    Rbf,
    Matern52,
}

/// Stationary covariance function with a single lengthscale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    lengthscale: f64,
    variance: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, lengthscale: f64, variance: f64) -> Result<Self> {
        if !(lengthscale > 0.0 && lengthscale.is_finite()) {
            return Err(GooseError::invalid(format!(
                "lengthscale must be positive, got {lengthscale}"
            )));
        }
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(GooseError::invalid(format!(
                "variance must be positive, got {variance}"
            )));
        }
        Ok(Self {
            family,
            lengthscale,
            variance,
        })
    }

    pub fn rbf(lengthscale: f64, variance: f64) -> Result<Self> {
        Self::new(KernelFamily::Rbf, lengthscale, variance)
    }

    pub fn matern52(lengthscale: f64, variance: f64) -> Result<Self> {
        Self::new(KernelFamily::Matern52, lengthscale, variance)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn lengthscale(&self) -> f64 {
        self.lengthscale
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Covariance as a function of Euclidean distance `r`.
    pub fn of_distance(&self, r: f64) -> f64 {
        let s = r / self.lengthscale;
        match self.family {
            KernelFamily::Rbf => self.variance * (-0.5 * s * s).exp(),
            KernelFamily::Matern52 => {
                let a = 5f64.sqrt() * s;
                self.variance * (1.0 + a + a * a / 3.0) * (-a).exp()
            }
        }
    }

    /// `k(x, z)`.
    pub fn eval(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        check_dims(x, z)?;
        Ok(self.eval_unchecked(x, z))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64], z: &[f64]) -> f64 {
        self.of_distance(euclidean(x, z))
    }

    /// Kernel metric `d(x, z) = sqrt(k(x,x) - 2 k(x,z) + k(z,z))`.
    pub fn metric(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        check_dims(x, z)?;
        Ok(self.metric_unchecked(x, z))
    }

    pub(crate) fn metric_unchecked(&self, x: &[f64], z: &[f64]) -> f64 {
        let kxz = self.eval_unchecked(x, z);
        (2.0 * self.variance - 2.0 * kxz).max(0.0).sqrt()
    }
}

fn check_dims(x: &[f64], z: &[f64]) -> Result<()> {
    if x.len() != z.len() {
        return Err(GooseError::DimensionMismatch {
            expected: x.len(),
            actual: z.len(),
        });
    }
    Ok(())
}

pub(crate) fn euclidean(x: &[f64], z: &[f64]) -> f64 {
    x.iter()
        .zip(z)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}
