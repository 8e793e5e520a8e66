//! Area measure approximants `eps^{gamma^2/2} e^{gamma h*_eps} dz` and the
//! ball-volume dimension estimator built on them.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::balls::{filled_metric_ball, VertexSet};
use crate::error::{Error, Result};
use crate::experiments::{fit_exponent, replica_seeds, FitLevel, FitReport};
use crate::fft::{self, Fft2};
use crate::field::{sample_field, spectral_point_variance, FieldSample, Normalization};
use crate::grid::{GridSpec, Rect, Vertex};
use crate::metric::{build_graph, distance_field, Stencil};
use crate::mollify::{mollify, mollify_many, mollify_unchecked, MollifiedField};
use crate::params::Parameters;
use crate::stats::{self, Interval};

pub const DIMENSION_EXPERIMENT: &str = "dim";

/// `eps^{gamma^2/2} * sum_{v in region} e^{gamma h*_eps(v)} * spacing^2`, the sum
/// running over window vertices in row-major order.
pub fn gmc_mass(
    mollified: &MollifiedField,
    gamma: f64,
    region: impl Fn(Vertex) -> bool,
) -> Result<f64> {
    let spec = &mollified.spec;
    let wi = spec.window_index();
    let n = spec.n;
    for i in 0..spec.len() {
        let v = Vertex::new(i % n, i / n);
        if wi.local(v).is_none() && region(v) {
            return Err(Error::Geometry(format!(
                "region contains ({}, {}) outside the window",
                v.ix, v.iy
            )));
        }
    }
    let h2 = spec.spacing().powi(2);
    let sum: f64 = (0..wi.len())
        .map(|i| wi.global(i))
        .filter(|&v| region(v))
        .map(|v| (gamma * mollified.at(v)).exp())
        .sum();
    Ok(mollified.eps.powf(gamma * gamma / 2.0) * sum * h2)
}

/// Vertices in the half-open rectangle `[x0, x1) x [y0, y1)`, so that a
/// grid-aligned rectangle holds exactly `area / spacing^2` vertices.
pub fn rect_region(spec: &GridSpec, rect: Rect) -> impl Fn(Vertex) -> bool {
    let h = spec.spacing();
    let tol = 1e-9 * h;
    move |v: Vertex| {
        let (x, y) = (v.ix as f64 * h, v.iy as f64 * h);
        x >= rect.x0 - tol && x < rect.x1 - tol && y >= rect.y0 - tol && y < rect.y1 - tol
    }
}

/// Multiplier `exp(-(gamma^2/2) (Var h*_eps - log(1/eps)))` making the
/// expected corrected mass equal to the lattice area of the region.
pub fn spectral_correction(spec: &GridSpec, gamma: f64, eps: f64) -> f64 {
    let var = spectral_point_variance(spec, eps);
    (-(gamma * gamma / 2.0) * (var - (1.0 / eps).ln())).exp()
}

/// Evaluates the band-limited field at the points `c + r (z_i - c)` for grid
/// points `z_i`, with `c` the centre of the torus and `1/r` a power of two.
fn rescaled_field(field: &FieldSample, r: f64) -> Result<Vec<f64>> {
    let m = (1.0 / r).round() as usize;
    if !m.is_power_of_two() || ((1.0 / m as f64) - r).abs() > 1e-12 {
        return Err(Error::Invalid(format!("scale {r} is not 2^-k")));
    }
    let n = field.spec.n;
    if m == 1 {
        return Ok(field.values.clone());
    }
    let big = n * m;
    let small = Fft2::new(n);
    let spectrum = fft::forward_real(&small, &field.values);
    // Zero-pad into the larger spectrum, splitting Nyquist bins evenly.
    let mut padded = vec![Complex64::default(); big * big];
    let place = |k: usize| -> Vec<(usize, f64)> {
        let s = fft::signed_freq(k, n);
        if n.is_multiple_of(2) && k == n / 2 {
            vec![(n / 2, 0.5), (big - n / 2, 0.5)]
        } else if s >= 0 {
            vec![(s as usize, 1.0)]
        } else {
            vec![((big as i64 + s) as usize, 1.0)]
        }
    };
    for ky in 0..n {
        for kx in 0..n {
            let c = spectrum[ky * n + kx];
            for &(by, wy) in &place(ky) {
                for &(bx, wx) in &place(kx) {
                    padded[by * big + bx] += c * (wy * wx);
                }
            }
        }
    }
    let fine = fft::inverse_real(&Fft2::new(big), padded);
    let scale = (big * big) as f64 / (n * n) as f64;
    // Fine index of c + r(z - c) = c(1-r) + r z with c = n/2 (lattice units).
    let offset = n / 2 * (m - 1);
    let mut out = vec![0.0; n * n];
    for iy in 0..n {
        for ix in 0..n {
            out[iy * n + ix] = fine[(offset + iy) * big + offset + ix] * scale;
        }
    }
    Ok(out)
}

/// Masses of `phi(A)` under `h` at `eps` and of `A` under
/// `h o phi + Q log r` at `eps / r`, where `phi(z) = c + r (z - c)` about the
/// torus centre. Conformal covariance predicts equality as `eps -> 0`.
pub fn gmc_coordinate_check(
    field: &FieldSample,
    params: &Parameters,
    eps: f64,
    r: f64,
    region: Rect,
) -> Result<(f64, f64)> {
    let spec = field.spec;
    let c = spec.side_length / 2.0;
    let image = Rect::new(
        c + r * (region.x0 - c),
        c + r * (region.y0 - c),
        c + r * (region.x1 - c),
        c + r * (region.y1 - c),
    );
    for rect in [&region, &image] {
        if !spec.window.contains(rect.x0, rect.y0) || !spec.window.contains(rect.x1, rect.y1) {
            return Err(Error::Geometry(format!("{rect:?} leaves the window")));
        }
    }
    let gamma = params.gamma;
    let lhs = gmc_mass(&mollify(field, eps)?, gamma, rect_region(&spec, image))?;
    let mut pulled = FieldSample {
        values: rescaled_field(field, r)?,
        ..field.clone()
    };
    let shift = params.q * r.ln();
    pulled.values.iter_mut().for_each(|v| *v += shift);
    let m = mollify_unchecked(&pulled, &[eps / r]).pop().unwrap();
    let rhs = gmc_mass(&m, gamma, rect_region(&spec, region))?;
    Ok((lhs, rhs))
}

/// Masses of `A + shift` under `h` and of `A` under the cyclically
/// translated field; identical up to summation round-off.
pub fn gmc_translation_check(
    field: &FieldSample,
    gamma: f64,
    eps: f64,
    shift: (usize, usize),
    region: Rect,
) -> Result<(f64, f64)> {
    let spec = field.spec;
    let h = spec.spacing();
    let moved = Rect::new(
        region.x0 + shift.0 as f64 * h,
        region.y0 + shift.1 as f64 * h,
        region.x1 + shift.0 as f64 * h,
        region.y1 + shift.1 as f64 * h,
    );
    let lhs = gmc_mass(&mollify(field, eps)?, gamma, rect_region(&spec, moved))?;
    let translated = field.translated(shift.0, shift.1);
    let rhs = gmc_mass(
        &mollify(&translated, eps)?,
        gamma,
        rect_region(&spec, region),
    )?;
    Ok((lhs, rhs))
}

pub const GMC_EXPERIMENT: &str = "gmc";

#[derive(Debug, Clone, PartialEq)]
pub struct GmcLevel {
    pub eps: f64,
    /// `exp(-(gamma^2/2)(Var h*_eps - log(1/eps)))`.
    pub correction: f64,
    /// Raw masses, one per replica per region, indexed `[replica][region]`.
    pub masses: Vec<Vec<f64>>,
    /// Corrected mean mass of each region and a 95% normal interval.
    pub corrected_mean: Vec<f64>,
    pub ci: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmcReport {
    pub gamma: f64,
    pub seeds: Vec<u64>,
    pub regions: Vec<Rect>,
    pub levels: Vec<GmcLevel>,
}

/// Masses of each region at each eps, one mean-zero field per replica shared
/// across eps levels.
pub fn gmc_study(
    gamma: f64,
    grid: &GridSpec,
    eps: &[f64],
    regions: &[Rect],
    replicas: usize,
    seed0: u64,
) -> Result<GmcReport> {
    if replicas < 2 {
        return Err(Error::Invalid("gmc study needs at least 2 replicas".into()));
    }
    let seeds = replica_seeds(seed0, GMC_EXPERIMENT, replicas)?;
    let per_replica: Vec<Vec<Vec<f64>>> = seeds
        .par_iter()
        .map(|&seed| {
            let f = sample_field(grid, seed, Normalization::MeanZero)?;
            mollify_many(&f, eps)?
                .iter()
                .map(|m| {
                    regions
                        .iter()
                        .map(|&r| gmc_mass(m, gamma, rect_region(grid, r)))
                        .collect()
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let levels = eps
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let correction = spectral_correction(grid, gamma, e);
            let masses: Vec<Vec<f64>> = per_replica.iter().map(|r| r[k].clone()).collect();
            let (mut corrected_mean, mut ci) = (Vec::new(), Vec::new());
            for j in 0..regions.len() {
                let xs: Vec<f64> = masses.iter().map(|m| m[j] * correction).collect();
                let m = stats::mean(&xs);
                let se = stats::std_dev(&xs) / (xs.len() as f64).sqrt();
                corrected_mean.push(m);
                ci.push(Interval {
                    lo: m - 1.96 * se,
                    hi: m + 1.96 * se,
                    std_error: se,
                });
            }
            GmcLevel {
                eps: e,
                correction,
                masses,
                corrected_mean,
                ci,
            }
        })
        .collect();
    Ok(GmcReport {
        gamma,
        seeds,
        regions: regions.to_vec(),
        levels,
    })
}

/// Ball masses of one replica.
#[derive(Debug, Clone, PartialEq)]
pub struct BallVolumes {
    pub seed: u64,
    /// `(s, mass of B•_s)` for each metric radius.
    pub volumes: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub replicas: Vec<BallVolumes>,
    /// Slope of `ln median mass` against `ln s`: the dimension estimate.
    pub fit: FitReport,
}

/// Masses of the filled balls `B•_s` around the window centre.
pub fn ball_volumes(
    field: &FieldSample,
    params: &Parameters,
    eps: f64,
    s_ladder: &[f64],
    stencil: Stencil,
) -> Result<Vec<(f64, f64)>> {
    let m = mollify(field, eps)?;
    let g = build_graph(&m, params.xi, stencil, 1.0)?;
    let (cx, cy) = field.spec.window.center();
    let center = field.spec.nearest_vertex(cx, cy)?;
    let df = distance_field(&g, &[center])?;
    let wi = field.spec.window_index();
    s_ladder
        .iter()
        .map(|&s| {
            let ball: VertexSet = filled_metric_ball(&df, s)?.vertices;
            let mass = gmc_mass(&m, params.gamma, |v| {
                wi.local(v).is_some_and(|i| ball.contains(i))
            })?;
            Ok((s, mass))
        })
        .collect()
}

pub fn ball_volume_dimension(
    params: &Parameters,
    grid: &GridSpec,
    eps: f64,
    s_ladder: &[f64],
    replicas: usize,
    seed0: u64,
) -> Result<DimensionReport> {
    if s_ladder.len() < 4 {
        return Err(Error::Degenerate("need at least 4 metric radii".into()));
    }
    let seeds = replica_seeds(seed0, DIMENSION_EXPERIMENT, replicas)?;
    let reps: Vec<BallVolumes> = seeds
        .par_iter()
        .map(|&seed| {
            let f = sample_field(grid, seed, Normalization::MeanZero)?;
            Ok(BallVolumes {
                seed,
                volumes: ball_volumes(&f, params, eps, s_ladder, Stencil::Eight)?,
            })
        })
        .collect::<Result<_>>()?;
    let fit = dimension_fit(&reps, 1000, seed0)?;
    Ok(DimensionReport {
        replicas: reps,
        fit,
    })
}

/// Log-log fit of ball mass against metric radius across replicas.
pub fn dimension_fit(reps: &[BallVolumes], bootstrap: usize, seed: u64) -> Result<FitReport> {
    let k = reps.first().map_or(0, |r| r.volumes.len());
    let levels: Vec<FitLevel> = (0..k)
        .map(|j| FitLevel {
            log_x: reps[0].volumes[j].0.ln(),
            samples: reps.iter().map(|r| r.volumes[j].1).collect(),
        })
        .collect();
    fit_exponent(&levels, bootstrap, seed)
}
