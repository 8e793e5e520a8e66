//! Small statistics toolkit: medians, percentile bootstrap, OLS, KS.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Linear-interpolated quantile of sorted data (type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median(xs: &[f64]) -> f64 {
    quantile_sorted(&sorted(xs), 0.5)
}

/// Percentile confidence interval of a bootstrap distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// Standard deviation of the bootstrap replicates.
    pub std_error: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Summarises bootstrap replicates as a central `level` percentile interval.
pub fn percentile_interval(replicates: &[f64], level: f64) -> Interval {
    let s = sorted(replicates);
    let alpha = (1.0 - level) / 2.0;
    let sd = if s.len() > 1 { std_dev(&s) } else { 0.0 };
    Interval {
        lo: quantile_sorted(&s, alpha),
        hi: quantile_sorted(&s, 1.0 - alpha),
        std_error: sd,
    }
}

/// Bootstrap of an arbitrary statistic over index resamples of `0..n`.
pub fn bootstrap<F>(n: usize, resamples: usize, seed: u64, mut stat: F) -> Vec<f64>
where
    F: FnMut(&[usize]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = vec![0usize; n];
    (0..resamples)
        .map(|_| {
            idx.iter_mut().for_each(|i| *i = rng.random_range(0..n));
            stat(&idx)
        })
        .collect()
}

/// 95% percentile bootstrap interval of the median.
pub fn median_interval(xs: &[f64], resamples: usize, seed: u64) -> Interval {
    let mut buf = Vec::with_capacity(xs.len());
    let reps = bootstrap(xs.len(), resamples, seed, |idx| {
        buf.clear();
        buf.extend(idx.iter().map(|&i| xs[i]));
        median(&buf)
    });
    percentile_interval(&reps, 0.95)
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Degenerate("need at least two (x, y) points".into()));
    }
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(Error::Degenerate("all x values are equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let a = sorted(a);
    let b = sorted(b);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians_and_quantiles() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(quantile_sorted(&[0.0, 10.0], 0.25), 2.5);
    }

    #[test]
    fn ols_exact_and_degenerate() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 0.25 * v - 1.0).collect();
        let (s, c) = ols(&x, &y).unwrap();
        assert!((s - 0.25).abs() < 1e-15 && (c + 1.0).abs() < 1e-15);
        assert!(matches!(ols(&[1.0; 4], &y), Err(Error::Degenerate(_))));
    }

    #[test]
    fn ks_cases() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(ks_statistic(&a, &a), 0.0);
        assert_eq!(ks_statistic(&a, &[10.0, 11.0]), 1.0);
        assert!((ks_statistic(&[1.0, 2.0], &[1.5, 2.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bootstrap_of_constant_is_degenerate() {
        let ci = median_interval(&[2.0; 10], 200, 1);
        assert_eq!((ci.lo, ci.hi, ci.std_error), (2.0, 2.0, 0.0));
    }
}
