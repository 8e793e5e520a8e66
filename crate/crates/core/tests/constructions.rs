//! Hand-built weight landscapes with known geodesic and ball structure.

use std::collections::VecDeque;

use lfpp_core::balls::{filled_metric_ball, hitting_radius, metric_ball};
use lfpp_core::confluence::{confluence_statistic, Targets};
use lfpp_core::metric::{distance_field, trace_geodesic, weyl_shift};
use lfpp_core::params::{derive_params, GAMMA_PURE_GRAVITY};
use lfpp_core::{MetricGraph, Stencil, Vertex};

fn graph(n: usize, weight: impl Fn(i64, i64) -> f64) -> MetricGraph {
    let w = (0..n * n)
        .map(|i| weight((i % n) as i64, (i / n) as i64))
        .collect();
    MetricGraph::from_weights(n, n, 1.0, w, Stencil::Eight, 1.0).unwrap()
}

fn r2(x: i64, y: i64, c: i64) -> i64 {
    (x - c).pow(2) + (y - c).pow(2)
}

#[test]
fn geodesic_follows_a_deep_corridor() {
    let xi = derive_params(GAMMA_PURE_GRAVITY, 4.0).unwrap().xi;
    let mut g = graph(64, |_, _| 1.0);
    g.xi = xi;
    // A U-shaped corridor from (10, 10) up to row 50 and back down to (50, 10).
    let corridor = |v: Vertex| {
        let (x, y) = (v.ix, v.iy);
        ((x == 10 || x == 50) && (10..=50).contains(&y)) || (y == 50 && (10..=50).contains(&x))
    };
    let shifted = weyl_shift(&g, |v| if corridor(v) { -5.0 / xi } else { 0.0 }).unwrap();
    let path = trace_geodesic(
        &distance_field(&shifted, &[Vertex::new(10, 10)]).unwrap(),
        Vertex::new(50, 10),
    )
    .unwrap();
    let inside = path.vertices.iter().filter(|v| corridor(**v)).count();
    assert!(
        inside * 10 >= path.vertices.len() * 9,
        "{inside} of {}",
        path.vertices.len()
    );
    // Without the bump the straight row is optimal.
    let plain = trace_geodesic(
        &distance_field(&g, &[Vertex::new(10, 10)]).unwrap(),
        Vertex::new(50, 10),
    )
    .unwrap();
    assert!(plain.vertices.iter().all(|v| v.iy == 10));
}

/// Complement components of `set` that avoid the lattice edge, by flood fill.
fn enclosed(n: usize, set: &[bool]) -> Vec<bool> {
    let mut reach = vec![false; n * n];
    let mut queue: VecDeque<usize> = (0..n * n)
        .filter(|&i| {
            let (x, y) = (i % n, i / n);
            !set[i] && (x == 0 || y == 0 || x == n - 1 || y == n - 1)
        })
        .collect();
    queue.iter().for_each(|&i| reach[i] = true);
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % n) as i64, (i / n) as i64);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (a, b) = (x + dx, y + dy);
                if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                    continue;
                }
                let j = b as usize * n + a as usize;
                if !set[j] && !reach[j] {
                    reach[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    (0..n * n).map(|i| !set[i] && !reach[i]).collect()
}

#[test]
fn moat_pocket_is_filled() {
    let n = 64;
    let c = 32;
    // Pocket of radius < 3, moat 3..=5, cheap pocket and expensive moat.
    let g = graph(n, |x, y| match r2(x, y, c) {
        d if d < 9 => 0.01,
        d if d <= 25 => 1000.0,
        _ => 1.0,
    });
    let df = distance_field(&g, &[Vertex::new(32, 26)]).unwrap();
    let ring: Vec<usize> = (0..g.len())
        .filter(|&i| (26..=49).contains(&r2((i % n) as i64, (i / n) as i64, c)))
        .collect();
    let s = ring.iter().map(|&i| df.dist[i]).fold(0.0, f64::max) + 0.5;
    let ball = metric_ball(&df, s).unwrap();
    let filled = filled_metric_ball(&df, s).unwrap();
    let oracle = enclosed(n, ball.mask());
    let pocket: Vec<usize> = (0..g.len())
        .filter(|&i| r2((i % n) as i64, (i / n) as i64, c) < 9)
        .collect();
    assert!(!pocket.is_empty());
    for &i in &pocket {
        assert!(df.dist[i] > s);
        assert!(!ball.contains(i));
        assert!(filled.vertices.contains(i));
    }
    for (i, &pocketed) in oracle.iter().enumerate() {
        assert_eq!(filled.vertices.contains(i), ball.contains(i) || pocketed);
    }
    assert!(ball.is_subset(&filled.vertices));
}

#[test]
fn walled_centre_funnels_geodesics() {
    let n = 128;
    let c = 64;
    // One-vertex wall on the ring of radius ~16, with gaps on the x axis.
    let wall = |x: i64, y: i64| {
        let d = r2(x, y, c);
        (225..=289).contains(&d) && (y - c).abs() > 1
    };
    let g = graph(n, |x, y| if wall(x, y) { 1e4 } else { 1.0 });
    let df = distance_field(&g, &[Vertex::new(64, 64)]).unwrap();
    let e = confluence_statistic(&df, 6.0, 45.0, Targets::AllBoundary).unwrap();
    let outer = filled_metric_ball(&df, 45.0).unwrap();
    // The wrapped wall is enclosed by the outer ball.
    for i in 0..g.len() {
        let v = g.vertex(i);
        if wall(v.ix as i64, v.iy as i64) {
            assert!(outer.vertices.contains(i));
        }
    }
    assert!(e.targets_per_t > 100);
    assert!((2..=6).contains(&e.ancestor_count), "{}", e.ancestor_count);
    assert!(e.ancestors.iter().all(|a| (a.iy as i64 - c).abs() <= 1));

    let open = graph(n, |_, _| 1.0);
    let df = distance_field(&open, &[Vertex::new(64, 64)]).unwrap();
    let control = confluence_statistic(&df, 6.0, 45.0, Targets::AllBoundary).unwrap();
    assert!(control.ancestor_count > 3 * e.ancestor_count);
}

#[test]
fn ball_growth_and_hitting_radius() {
    let g = graph(41, |x, y| 0.5 + ((x * 7 + y * 13) % 11) as f64 / 10.0);
    let df = distance_field(&g, &[Vertex::new(20, 20)]).unwrap();
    let mut levels: Vec<f64> = df.dist.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut last = 0;
    for pair in levels.windows(2).take(200) {
        let size = metric_ball(&df, pair[0]).unwrap().len();
        assert!(size > last);
        // Right-continuity: between attained levels the ball does not grow.
        if pair[1] - pair[0] > 1e-9 {
            let mid = 0.5 * (pair[0] + pair[1]);
            assert_eq!(metric_ball(&df, mid).unwrap().len(), size);
        }
        last = size;
    }
    let scaled = weyl_shift(&g, |_| 0.7).unwrap();
    let ds = distance_field(&scaled, &[Vertex::new(20, 20)]).unwrap();
    for r in [3.0, 8.0, 15.0] {
        let a = hitting_radius(&df, r).unwrap();
        let b = hitting_radius(&ds, r).unwrap();
        assert!((b / a - 0.7f64.exp()).abs() < 1e-12);
    }
}
