//! Monte Carlo checks of the experiment layer.

use lfpp_core::experiments::bilip::bilipschitz_estimate;
use lfpp_core::experiments::crossing::crossing_study;
use lfpp_core::experiments::fit::{fit_exponent, FitLevel};
use lfpp_core::experiments::tightness::tightness_compare;
use lfpp_core::experiments::{crossing_distance, Direction};
use lfpp_core::field::sample_field;
use lfpp_core::measure::gmc_coordinate_check;
use lfpp_core::metric::{build_graph, weyl_shift};
use lfpp_core::mollify::mollify;
use lfpp_core::params::{derive_params, GAMMA_PURE_GRAVITY};
use lfpp_core::{stats, GridSpec, Normalization, Rect, Stencil};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

#[test]
fn fit_recovers_noisy_power_law() {
    let log_eps: Vec<f64> = (3..=6)
        .map(|k| -(k as f64) * std::f64::consts::LN_2)
        .collect();
    let mut covered = 0;
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let noise = Normal::new(0.0, 0.02).unwrap();
        let levels: Vec<FitLevel> = log_eps
            .iter()
            .map(|&x| FitLevel {
                log_x: x,
                samples: (0..50)
                    .map(|_| (x / 6.0 + noise.sample(&mut rng)).exp())
                    .collect(),
            })
            .collect();
        let fit = fit_exponent(&levels, 400, trial).unwrap();
        covered += fit.ci.contains(1.0 / 6.0) as usize;
    }
    assert!(covered >= 90, "coverage {covered}/100");
}

#[test]
fn fit_exact_and_flat_data() {
    let exact: Vec<FitLevel> = (0..5)
        .map(|k| FitLevel {
            log_x: k as f64,
            samples: vec![(0.25 * k as f64).exp(); 3],
        })
        .collect();
    let fit = fit_exponent(&exact, 200, 1).unwrap();
    assert!((fit.slope - 0.25).abs() < 1e-12 && fit.ci.width() < 1e-12);
    let flat: Vec<FitLevel> = (0..5)
        .map(|k| FitLevel {
            log_x: k as f64,
            samples: vec![2.0; 4],
        })
        .collect();
    assert!(fit_exponent(&flat, 200, 1).unwrap().slope.abs() < 1e-12);
}

#[test]
fn zero_field_crossings_are_unit() {
    let grid = GridSpec::new(128, 2.0).unwrap();
    let p = derive_params(GAMMA_PURE_GRAVITY, 4.0).unwrap();
    let f = lfpp_core::FieldSample::constant(grid, 0.0).unwrap();
    let g = build_graph(&mollify(&f, 0.0625).unwrap(), p.xi, Stencil::Eight, 1.0).unwrap();
    let square = grid.unit_square().unwrap();
    let d = crossing_distance(&g, &square, Direction::Horizontal).unwrap();
    assert!((d - 1.0).abs() < 1e-12, "{d}");
    let report = crossing_study(&p, &grid, &[0.125, 0.0625], 5, 3, Stencil::Eight).unwrap();
    for level in &report.levels {
        assert!(level.median > 0.0 && level.crossings.iter().all(|&c| c > 0.0));
    }
}

#[test]
fn bilip_invariants() {
    let grid = GridSpec::new(128, 2.0).unwrap();
    let p = derive_params(GAMMA_PURE_GRAVITY, 4.0).unwrap();
    let f = sample_field(&grid, 8, Normalization::MeanZero).unwrap();
    let m = mollify(&f, 0.0625).unwrap();
    let a = build_graph(&m, p.xi, Stencil::Eight, 1.0).unwrap();
    let b = build_graph(&m, p.xi, Stencil::Eight, 4.0).unwrap();
    let r = bilipschitz_estimate(&a, &b, 0.25, 40, 2).unwrap();
    assert!(0.0 < r.min_ratio && r.min_ratio <= r.max_ratio && r.max_ratio.is_finite());
    let side = (a.width() - 1) as f64 * a.spacing;
    assert!(r.pairs.iter().all(|q| q.sep >= 0.25 * side - 1e-12));
    // A common constant shift of both fields leaves the extremes unchanged.
    let (sa, sb) = (
        weyl_shift(&a, |_| 1.3).unwrap(),
        weyl_shift(&b, |_| 1.3).unwrap(),
    );
    let s = bilipschitz_estimate(&sa, &sb, 0.25, 40, 2).unwrap();
    assert!((s.min_ratio / r.min_ratio - 1.0).abs() < 1e-12);
    assert!((s.max_ratio / r.max_ratio - 1.0).abs() < 1e-12);
    // Doubling one graph's weights doubles both extremes.
    let d = weyl_shift(&a, |_| std::f64::consts::LN_2 / p.xi).unwrap();
    let same = bilipschitz_estimate(&a, &d, 0.25, 40, 2).unwrap();
    assert!((same.min_ratio - 2.0).abs() < 1e-12 && (same.max_ratio - 2.0).abs() < 1e-12);
}

/// Mean over seeds of `|lhs - rhs| / rhs` for the scaling `z -> c + (z - c)/2`.
fn coordinate_discrepancy(n: usize, eps: f64, seeds: u64) -> f64 {
    let grid = GridSpec::new(n, 2.0).unwrap();
    let p = derive_params(GAMMA_PURE_GRAVITY, 4.0).unwrap();
    let region = Rect::new(0.6, 0.6, 1.4, 1.4);
    let d: Vec<f64> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let f = sample_field(&grid, s, Normalization::MeanZero).unwrap();
            let (l, r) = gmc_coordinate_check(&f, &p, eps, 0.5, region).unwrap();
            ((l - r) / r).abs()
        })
        .collect();
    stats::mean(&d)
}

#[test]
fn coordinate_change_discrepancy_shrinks() {
    // eps tied to the lattice (eight spacings) so both levels resolve eps / r alike.
    let coarse = coordinate_discrepancy(256, 0.0625, 200);
    let fine = coordinate_discrepancy(512, 0.03125, 200);
    assert!(coarse <= 0.15 && fine <= 0.15, "{coarse} {fine}");
    assert!(fine < coarse, "{coarse} -> {fine}");
}

#[test]
fn tightness_statistics() {
    let p = derive_params(GAMMA_PURE_GRAVITY, 4.0).unwrap();
    let small = GridSpec::new(128, 2.0).unwrap();
    let same = tightness_compare(&p, &small, 0.0625, 0.3, 0.3, 20, 1).unwrap();
    assert_eq!(same.ks, 0.0);

    let grid = GridSpec::new(1024, 2.0).unwrap();
    let r = tightness_compare(&p, &grid, 1.0 / 64.0, 0.2, 0.4, 400, 5).unwrap();
    assert!(r.ks < 0.15, "KS {}", r.ks);
}
