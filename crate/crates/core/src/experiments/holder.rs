//! Local log-log slopes of distance against Euclidean separation, compared
//! with the Hölder exponent band `(0.9 xi(Q-2), 1.1 xi(Q+2))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::{distances_to, MetricGraph};
use crate::params::Parameters;
use crate::stats;

/// Separation decades in grid spacings.
pub const DECADES: [(f64, f64); 3] = [(4.0, 40.0), (40.0, 400.0), (400.0, 4000.0)];
/// The anchor point sits at this fraction of the way from `u` to `v`.
pub const ANCHOR_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct HolderPair {
    pub decade: usize,
    /// Separations `|u-a|`, `|u-v|` in physical units.
    pub sep_anchor: f64,
    pub sep: f64,
    pub d_anchor: f64,
    pub d: f64,
    /// `ln(d/d_anchor) / ln(sep/sep_anchor)`.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecadeSummary {
    pub lo: f64,
    pub hi: f64,
    pub pairs: usize,
    pub fraction_inside: f64,
    /// OLS slope of `ln d` against `ln sep` within the decade.
    pub fitted_slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    /// `0.9 xi (Q-2)`.
    pub chi: f64,
    /// `1.1 xi (Q+2)`.
    pub chi_prime: f64,
    pub pairs: Vec<HolderPair>,
    pub decades: Vec<DecadeSummary>,
    /// OLS slope over all pairs.
    pub fitted_slope: f64,
}

/// Band endpoints `(0.9 xi(Q-2), 1.1 xi(Q+2))`.
pub fn holder_band(params: &Parameters) -> (f64, f64) {
    (
        0.9 * params.holder_lower_exponent(),
        1.1 * params.holder_upper_exponent(),
    )
}

/// Samples `pairs_per_decade` pairs in each separation decade that fits in
/// the window and records their local slopes.
pub fn holder_scan(
    graph: &MetricGraph,
    params: &Parameters,
    pairs_per_decade: usize,
    seed: u64,
) -> Result<HolderReport> {
    if pairs_per_decade < 100 {
        return Err(Error::Invalid(format!(
            "holder scan needs at least 100 pairs per decade, got {pairs_per_decade}"
        )));
    }
    let (chi, chi_prime) = holder_band(params);
    let (w, hgt) = (graph.width() as i64, graph.height() as i64);
    let max_sep = (((w - 1) * (w - 1) + (hgt - 1) * (hgt - 1)) as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    let mut decades = Vec::new();
    for (k, &(lo, hi)) in DECADES.iter().enumerate() {
        let hi = hi.min(max_sep * 0.95);
        if hi <= lo {
            continue;
        }
        let mut found = Vec::with_capacity(pairs_per_decade);
        let mut attempts = 0usize;
        while found.len() < pairs_per_decade {
            attempts += 1;
            if attempts > 10_000 * pairs_per_decade {
                return Err(Error::Geometry(format!(
                    "could not place pairs with separation in [{lo}, {hi}) spacings"
                )));
            }
            let r = (rng.random_range(lo.ln()..hi.ln())).exp();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let (ux, uy) = (rng.random_range(0..w), rng.random_range(0..hgt));
            let vx = ux + (r * theta.cos()).round() as i64;
            let vy = uy + (r * theta.sin()).round() as i64;
            if vx < 0 || vy < 0 || vx >= w || vy >= hgt {
                continue;
            }
            let ax = ux + ((vx - ux) as f64 * ANCHOR_FRACTION).round() as i64;
            let ay = uy + ((vy - uy) as f64 * ANCHOR_FRACTION).round() as i64;
            let sep = (((vx - ux).pow(2) + (vy - uy).pow(2)) as f64).sqrt();
            let sep_a = (((ax - ux).pow(2) + (ay - uy).pow(2)) as f64).sqrt();
            if sep < lo || sep >= hi || sep_a < 1.0 {
                continue;
            }
            let u = (uy * w + ux) as usize;
            let v = (vy * w + vx) as usize;
            let a = (ay * w + ax) as usize;
            let d = distances_to(graph, u, &[a, v]);
            let h = graph.spacing;
            found.push(HolderPair {
                decade: k,
                sep_anchor: sep_a * h,
                sep: sep * h,
                d_anchor: d[0],
                d: d[1],
                slope: (d[1] / d[0]).ln() / (sep / sep_a).ln(),
            });
        }
        let inside = found
            .iter()
            .filter(|p| p.slope > chi && p.slope < chi_prime)
            .count();
        let (x, y): (Vec<f64>, Vec<f64>) = found.iter().map(|p| (p.sep.ln(), p.d.ln())).unzip();
        decades.push(DecadeSummary {
            lo: lo * graph.spacing,
            hi: hi * graph.spacing,
            pairs: found.len(),
            fraction_inside: inside as f64 / found.len() as f64,
            fitted_slope: stats::ols(&x, &y)?.0,
        });
        pairs.extend(found);
    }
    if decades.is_empty() {
        return Err(Error::Geometry(
            "window too small for any separation decade".into(),
        ));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.iter().map(|p| (p.sep.ln(), p.d.ln())).unzip();
    Ok(HolderReport {
        chi,
        chi_prime,
        fitted_slope: stats::ols(&x, &y)?.0,
        pairs,
        decades,
    })
}
