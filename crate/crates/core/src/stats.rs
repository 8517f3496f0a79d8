//! Small statistical helpers shared by the estimators.

use rand::Rng;
use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::rng::SimRng;

/// Mean of a Kolmogorov-distributed variable, i.e. the expected sup-distance
/// between an N-sample empirical CDF and its own law is about this over √N.
pub const KOLMOGOROV_MEAN: f64 = 0.868_731_160_636_6;

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, se: 0.0 }
    }
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail Q(x) = 1 − Φ(x), accurate for large x.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let m = mean(xs);
    if xs.len() < 2 {
        return Estimate { value: m, se: f64::NAN };
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    Estimate {
        value: m,
        se: (var / n).sqrt(),
    }
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
}

/// Nonparametric bootstrap standard error of `stat`, which receives the
/// resampled row indices. The index buffer is reused across replicates.
pub fn bootstrap_se<F>(len: usize, reps: usize, rng: &mut SimRng, mut stat: F) -> f64
where
    F: FnMut(&[usize]) -> f64,
{
    let mut idx = vec![0usize; len];
    let mut values = Vec::with_capacity(reps);
    for _ in 0..reps {
        for slot in idx.iter_mut() {
            *slot = rng.random_range(0..len);
        }
        values.push(stat(&idx));
    }
    variance(&values).sqrt()
}

/// E|Z|^p for a standard normal Z.
pub fn normal_abs_moment(p: f64) -> f64 {
    use libm::lgamma as ln_gamma;
    (0.5 * p * 2f64.ln() + ln_gamma(0.5 * (p + 1.0)) - 0.5 * PI.ln()).exp()
}
