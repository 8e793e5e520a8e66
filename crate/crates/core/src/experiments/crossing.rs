//! Left-right crossing medians of the unit square and their scaling in eps.

use rayon::prelude::*;

use super::{crossing_distance, replica_seeds, Direction};
use crate::error::Result;
use crate::field::{sample_field, FieldSample, Normalization};
use crate::grid::GridSpec;
use crate::metric::{build_graph, Stencil};
use crate::mollify::mollify_many;
use crate::params::Parameters;
use crate::stats::{self, Interval};

pub const EXPERIMENT: &str = "crossings";
const BOOTSTRAP: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingLevel {
    pub eps: f64,
    pub seeds: Vec<u64>,
    pub crossings: Vec<f64>,
    /// The `a_eps` estimate.
    pub median: f64,
    pub ci: Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingReport {
    pub params: Parameters,
    pub grid: GridSpec,
    pub levels: Vec<CrossingLevel>,
}

/// Field normalisation used for crossing medians: zero circle average on the
/// unit circle about the window centre.
pub fn crossing_normalization(grid: &GridSpec) -> Normalization {
    Normalization::CircleAverageZero {
        center: grid.window.center(),
        radius: 1.0,
    }
}

/// Crossing distances of one field at each eps, same order as `eps`.
pub fn field_crossings(
    field: &FieldSample,
    params: &Parameters,
    eps: &[f64],
    stencil: Stencil,
    anisotropy_a: f64,
    direction: Direction,
) -> Result<Vec<f64>> {
    let square = field.spec.unit_square()?;
    mollify_many(field, eps)?
        .iter()
        .map(|m| {
            let g = build_graph(m, params.xi, stencil, anisotropy_a)?;
            crossing_distance(&g, &square, direction)
        })
        .collect()
}

/// Per-replica crossings at every eps. Each replica's field is shared by all
/// eps levels.
pub fn crossing_study(
    params: &Parameters,
    grid: &GridSpec,
    eps: &[f64],
    replicas: usize,
    seed0: u64,
    stencil: Stencil,
) -> Result<CrossingReport> {
    grid.unit_square()?;
    let seeds = replica_seeds(seed0, EXPERIMENT, replicas)?;
    let norm = crossing_normalization(grid);
    let per_replica: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&s| {
            let field = sample_field(grid, s, norm)?;
            field_crossings(&field, params, eps, stencil, 1.0, Direction::Horizontal)
        })
        .collect::<Result<_>>()?;
    let levels = eps
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let crossings: Vec<f64> = per_replica.iter().map(|r| r[k]).collect();
            CrossingLevel {
                eps: e,
                seeds: seeds.clone(),
                median: stats::median(&crossings),
                ci: stats::median_interval(&crossings, BOOTSTRAP, seed0 ^ k as u64),
                crossings,
            }
        })
        .collect();
    Ok(CrossingReport {
        params: *params,
        grid: *grid,
        levels,
    })
}

/// Single-eps entry of [`crossing_study`].
pub fn crossing_median(
    params: &Parameters,
    grid: &GridSpec,
    eps: f64,
    replicas: usize,
    seed0: u64,
) -> Result<CrossingLevel> {
    let mut report = crossing_study(params, grid, &[eps], replicas, seed0, Stencil::Eight)?;
    Ok(report.levels.remove(0))
}

impl CrossingReport {
    /// `(ln eps, crossings)` levels for [`super::fit_exponent`].
    pub fn fit_levels(&self) -> Vec<super::FitLevel> {
        self.levels
            .iter()
            .map(|l| super::FitLevel {
                log_x: l.eps.ln(),
                samples: l.crossings.clone(),
            })
            .collect()
    }
}
