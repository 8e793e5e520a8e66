//! Vertical/horizontal crossing ratio of the stretched metric.

use rayon::prelude::*;

use super::crossing::field_crossings;
use super::{replica_seeds, Direction};
use crate::error::{Error, Result};
use crate::field::{sample_field, Normalization};
use crate::grid::GridSpec;
use crate::metric::Stencil;
use crate::params::Parameters;
use crate::stats::{self, Interval};

pub const EXPERIMENT: &str = "rotation";
const BOOTSTRAP: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct RotationLevel {
    pub eps: f64,
    pub horizontal: Vec<f64>,
    pub vertical: Vec<f64>,
    /// `median(vertical) / median(horizontal)`.
    pub ratio: f64,
    pub ci: Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationReport {
    pub anisotropy_a: f64,
    pub seeds: Vec<u64>,
    pub levels: Vec<RotationLevel>,
}

/// Ratio of medians with a paired bootstrap over replicas.
pub fn ratio_level(eps: f64, horizontal: Vec<f64>, vertical: Vec<f64>, seed: u64) -> RotationLevel {
    let ratio = stats::median(&vertical) / stats::median(&horizontal);
    let (mut hb, mut vb) = (Vec::new(), Vec::new());
    let reps = stats::bootstrap(horizontal.len(), BOOTSTRAP, seed, |idx| {
        hb.clear();
        vb.clear();
        hb.extend(idx.iter().map(|&i| horizontal[i]));
        vb.extend(idx.iter().map(|&i| vertical[i]));
        stats::median(&vb) / stats::median(&hb)
    });
    RotationLevel {
        eps,
        horizontal,
        vertical,
        ratio,
        ci: stats::percentile_interval(&reps, 0.95),
    }
}

pub fn rotation_anisotropy(
    params: &Parameters,
    grid: &GridSpec,
    anisotropy_a: f64,
    eps: &[f64],
    replicas: usize,
    seed0: u64,
) -> Result<RotationReport> {
    if !(anisotropy_a >= 1.0) {
        return Err(Error::Domain {
            name: "anisotropy_a",
            value: anisotropy_a,
            expected: "anisotropy_a >= 1",
        });
    }
    let seeds = replica_seeds(seed0, EXPERIMENT, replicas)?;
    let per_replica: Vec<(Vec<f64>, Vec<f64>)> = seeds
        .par_iter()
        .map(|&s| {
            let f = sample_field(grid, s, Normalization::MeanZero)?;
            let h = field_crossings(
                &f,
                params,
                eps,
                Stencil::Eight,
                anisotropy_a,
                Direction::Horizontal,
            )?;
            let v = field_crossings(
                &f,
                params,
                eps,
                Stencil::Eight,
                anisotropy_a,
                Direction::Vertical,
            )?;
            Ok((h, v))
        })
        .collect::<Result<_>>()?;
    let levels = eps
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let h = per_replica.iter().map(|r| r.0[k]).collect();
            let v = per_replica.iter().map(|r| r.1[k]).collect();
            ratio_level(e, h, v, seed0 ^ (k as u64 + 1))
        })
        .collect();
    Ok(RotationReport {
        anisotropy_a,
        seeds,
        levels,
    })
}
