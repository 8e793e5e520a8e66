//! Log-log exponent fits with a replica bootstrap.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::splitmix64;
use crate::stats::{self, Interval};

/// One abscissa with its replica values (positive, untransformed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitLevel {
    /// Already log-transformed abscissa, e.g. `ln eps`.
    pub log_x: f64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub x: Vec<f64>,
    /// `ln median(samples)` per level.
    pub y: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// 95% percentile bootstrap interval of the slope.
    pub ci: Interval,
    pub bootstrap: usize,
}

fn log_median(samples: &[f64]) -> f64 {
    stats::median(samples).ln()
}

/// OLS slope of `ln median` against `log_x`; the bootstrap resamples replicas
/// independently within each level.
pub fn fit_exponent(levels: &[FitLevel], bootstrap: usize, seed: u64) -> Result<FitReport> {
    if levels.len() < 4 {
        return Err(Error::Degenerate(format!(
            "need at least 4 levels, got {}",
            levels.len()
        )));
    }
    if levels
        .iter()
        .any(|l| l.samples.is_empty() || l.samples.iter().any(|&s| !(s > 0.0)))
    {
        return Err(Error::Invalid(
            "level samples must be nonempty and positive".into(),
        ));
    }
    let x: Vec<f64> = levels.iter().map(|l| l.log_x).collect();
    let y: Vec<f64> = levels.iter().map(|l| log_median(&l.samples)).collect();
    let (slope, intercept) = stats::ols(&x, &y)?;

    let per_level: Vec<Vec<f64>> = levels
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let mut buf = Vec::with_capacity(l.samples.len());
            stats::bootstrap(
                l.samples.len(),
                bootstrap,
                splitmix64(seed ^ k as u64),
                |idx| {
                    buf.clear();
                    buf.extend(idx.iter().map(|&i| l.samples[i]));
                    log_median(&buf)
                },
            )
        })
        .collect();
    let slopes: Vec<f64> = (0..bootstrap)
        .map(|b| {
            let yb: Vec<f64> = per_level.iter().map(|v| v[b]).collect();
            stats::ols(&x, &yb).map(|(s, _)| s)
        })
        .collect::<Result<_>>()?;
    let ci = if slopes.is_empty() {
        Interval {
            lo: slope,
            hi: slope,
            std_error: 0.0,
        }
    } else {
        stats::percentile_interval(&slopes, 0.95)
    };
    Ok(FitReport {
        x,
        y,
        slope,
        intercept,
        ci,
        bootstrap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn exact(slope: f64) -> Vec<FitLevel> {
        (3..7)
            .map(|k| {
                let x = -(k as f64) * std::f64::consts::LN_2;
                FitLevel {
                    log_x: x,
                    samples: vec![(slope * x).exp(); 5],
                }
            })
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let r = fit_exponent(&exact(0.25), 200, 1).unwrap();
        assert!((r.slope - 0.25).abs() < 1e-12);
        assert!(r.ci.width() < 1e-12);
        let r = fit_exponent(&exact(0.0), 200, 1).unwrap();
        assert!(r.slope.abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let mut lv = exact(0.25);
        assert!(fit_exponent(&lv[..3], 10, 0).is_err());
        lv.iter_mut().for_each(|l| l.log_x = 1.0);
        assert!(matches!(
            fit_exponent(&lv, 10, 0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn synthetic_noise_coverage() {
        let truth = 1.0 / 6.0;
        let noise = Normal::new(0.0, 0.02).unwrap();
        let mut covered = 0;
        for trial in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(trial);
            let levels: Vec<FitLevel> = (3..7)
                .map(|k| {
                    let x = -(k as f64) * std::f64::consts::LN_2;
                    FitLevel {
                        log_x: x,
                        samples: (0..50)
                            .map(|_| (truth * x + noise.sample(&mut rng)).exp())
                            .collect(),
                    }
                })
                .collect();
            let r = fit_exponent(&levels, 400, trial).unwrap();
            covered += usize::from(r.ci.contains(truth));
        }
        assert!(covered >= 90, "coverage {covered}/100");
    }
}
