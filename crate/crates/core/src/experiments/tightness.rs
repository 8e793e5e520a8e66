//! Tightness across scales: laws of `c_r^{-1} e^{-xi h_r} D(r u0, r v0)`
//! compared between two scales with a KS statistic.

use rayon::prelude::*;

use super::replica_seeds;
use crate::error::{Error, Result};
use crate::field::{circle_average, sample_field, Normalization};
use crate::grid::GridSpec;
use crate::metric::{build_graph, point_distance, Stencil};
use crate::mollify::mollify;
use crate::params::Parameters;
use crate::stats;

pub const EXPERIMENT: &str = "tightness";

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport {
    pub r1: f64,
    pub r2: f64,
    pub eps: f64,
    pub seeds: Vec<u64>,
    pub normalized_r1: Vec<f64>,
    pub normalized_r2: Vec<f64>,
    pub ks: f64,
}

/// `D / (r^{xi Q} e^{xi h_r})`.
pub fn normalize_distance(params: &Parameters, r: f64, circle_avg: f64, distance: f64) -> f64 {
    distance / (params.scale_constant(r) * (params.xi * circle_avg).exp())
}

pub fn tightness_compare(
    params: &Parameters,
    grid: &GridSpec,
    eps: f64,
    r1: f64,
    r2: f64,
    replicas: usize,
    seed0: u64,
) -> Result<TightnessReport> {
    let h = grid.spacing();
    for r in [r1, r2] {
        // u0, v0 = (±0.25, 0) in rescaled units; the pair must be resolvable.
        if !(r > 0.0) || 0.5 * r < 4.0 * h {
            return Err(Error::Domain {
                name: "r",
                value: r,
                expected: "r/2 at least 4 grid spacings",
            });
        }
    }
    let center = grid.window.center();
    let seeds = replica_seeds(seed0, EXPERIMENT, replicas)?;
    let samples: Vec<(f64, f64)> = seeds
        .par_iter()
        .map(|&s| {
            let f = sample_field(grid, s, Normalization::MeanZero)?;
            let g = build_graph(&mollify(&f, eps)?, params.xi, Stencil::Eight, 1.0)?;
            let at = |r: f64| -> Result<f64> {
                let u = grid.nearest_vertex(center.0 - 0.25 * r, center.1)?;
                let v = grid.nearest_vertex(center.0 + 0.25 * r, center.1)?;
                let d = point_distance(&g, u, v)?;
                let hr = circle_average(&f, center, r)?;
                Ok(normalize_distance(params, r, hr, d))
            };
            Ok((at(r1)?, at(r2)?))
        })
        .collect::<Result<_>>()?;
    let normalized_r1: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let normalized_r2: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(TightnessReport {
        r1,
        r2,
        eps,
        seeds,
        ks: stats::ks_statistic(&normalized_r1, &normalized_r2),
        normalized_r1,
        normalized_r2,
    })
}
