use crate::error::{GooseError, Result};

/// Largest `t` examined by [`sample_bound`].
pub const SAMPLE_BOUND_CAP: u64 = 100_000_000;

/// Smallest `t` with `t / (beta_t gamma_t) >= C |R| / eps^2`, where
/// `beta_t^{1/2} = B + 4 sigma sqrt(gamma_t + 1 + ln(1/delta))` and
/// `C = 8 / ln(1 + sigma^-2)`. Found by increasing scan.
pub fn sample_bound<F>(rkhs_bound: f64, sigma: f64, delta: f64, gamma: F, region_size: usize, eps: f64) -> Result<u64>
where
    F: Fn(u64) -> f64,
{
    sample_bound_capped(rkhs_bound, sigma, delta, gamma, region_size, eps, SAMPLE_BOUND_CAP)
}

/// [`sample_bound`] with an explicit scan limit.
pub fn sample_bound_capped<F>(
    rkhs_bound: f64,
    sigma: f64,
    delta: f64,
    gamma: F,
    region_size: usize,
    eps: f64,
    cap: u64,
) -> Result<u64>
where
    F: Fn(u64) -> f64,
{
    if !(rkhs_bound > 0.0 && sigma > 0.0 && eps > 0.0) || region_size == 0 {
        return Err(GooseError::invalid("sample_bound parameters must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(GooseError::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let c = 8.0 / (1.0 + 1.0 / (sigma * sigma)).ln();
    let rhs = c * region_size as f64 / (eps * eps);
    let log_delta = (1.0 / delta).ln();
    for t in 1..=cap {
        let g = gamma(t);
        let root = rkhs_bound + 4.0 * sigma * (g.max(0.0) + 1.0 + log_delta).sqrt();
        let denom = root * root * g;
        if denom <= 0.0 || t as f64 / denom >= rhs {
            return Ok(t);
        }
    }
    Err(GooseError::Overflow(cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_epsilon_gives_one() {
        assert_eq!(sample_bound(1.0, 0.1, 0.1, |t| (1.0 + t as f64).ln(), 10, 1e9).unwrap(), 1);
    }

    #[test]
    fn monotone_in_region() {
        let g = |t: u64| (1.0 + t as f64).ln();
        let a = sample_bound(1.0, 0.1, 0.1, g, 5, 0.5).unwrap();
        let b = sample_bound(1.0, 0.1, 0.1, g, 10, 0.5).unwrap();
        assert!(b >= a);
    }

    #[test]
    fn overflow_and_bad_input() {
        // gamma growing linearly never satisfies the inequality
        assert!(matches!(
            sample_bound_capped(1.0, 0.1, 0.1, |t| t as f64, 10, 0.5, 10_000),
            Err(GooseError::Overflow(10_000))
        ));
        assert!(sample_bound(1.0, 0.1, 1.0, |t| t as f64, 10, 0.5).is_err());
    }
}
