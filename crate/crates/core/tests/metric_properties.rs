use lfpp_core::metric::{
    distance_field, internal_distance, point_distance, trace_geodesic, weyl_shift,
};
use lfpp_core::{MetricGraph, Stencil, Vertex};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(n: usize, seed: u64, stencil: Stencil, xi: f64) -> MetricGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (0..n * n)
        .map(|_| rng.random_range(-2.0f64..2.0).exp())
        .collect();
    let mut g = MetricGraph::from_weights(n, n, 0.5, w, stencil, 1.0).unwrap();
    g.xi = xi;
    g
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn stencil(k: usize) -> Stencil {
    [Stencil::Four, Stencil::Eight, Stencil::Sixteen][k]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_weyl_scales_distances(seed in any::<u64>(), k in 0usize..3, xi in 0.1f64..1.0) {
        let g = random_graph(12, seed, stencil(k), xi);
        let src = Vertex::new(3, 4);
        let base = distance_field(&g, &[src]).unwrap();
        for c in [-1.0, 0.3, 2.0] {
            let shifted = weyl_shift(&g, |_| c).unwrap();
            let df = distance_field(&shifted, &[src]).unwrap();
            let factor = (xi * c).exp();
            for u in 0..g.len() {
                prop_assert!(rel(df.dist[u], factor * base.dist[u]) <= 1e-12);
                prop_assert_eq!(df.predecessor(u), base.predecessor(u));
            }
        }
    }

    #[test]
    fn symmetric(seed in any::<u64>(), k in 0usize..3, a in (0usize..10, 0usize..10), b in (0usize..10, 0usize..10)) {
        let g = random_graph(10, seed, stencil(k), 0.5);
        let (u, v) = (Vertex::new(a.0, a.1), Vertex::new(b.0, b.1));
        prop_assert!(rel(point_distance(&g, u, v).unwrap(), point_distance(&g, v, u).unwrap()) <= 1e-12);
    }

    #[test]
    fn length_space(seed in any::<u64>(), k in 0usize..3) {
        let g = random_graph(10, seed, stencil(k), 0.5);
        let v = Vertex::new(7, 2);
        let from_v = distance_field(&g, &[v]).unwrap();
        for u in 0..g.len() {
            if g.vertex(u) == v {
                prop_assert_eq!(from_v.dist[u], 0.0);
                continue;
            }
            let best = g.neighbors(u).into_iter().map(|(m, c)| c + from_v.dist[m]).fold(f64::INFINITY, f64::min);
            prop_assert!(rel(from_v.dist[u], best) <= 1e-12);
        }
    }

    #[test]
    fn geodesic_length_is_distance(seed in any::<u64>(), k in 0usize..3, t in (0usize..12, 0usize..12)) {
        let g = random_graph(12, seed, stencil(k), 0.5);
        let df = distance_field(&g, &[Vertex::new(6, 6)]).unwrap();
        let path = trace_geodesic(&df, Vertex::new(t.0, t.1)).unwrap();
        let cost: f64 = path
            .vertices
            .windows(2)
            .map(|w| g.edge_cost(g.local(w[0]).unwrap(), g.local(w[1]).unwrap()).expect("consecutive vertices are adjacent"))
            .sum();
        prop_assert!(rel(cost, df.dist_at(Vertex::new(t.0, t.1)).unwrap()) <= 1e-12);
    }

    #[test]
    fn stencil_monotonicity(seed in any::<u64>()) {
        let src = Vertex::new(5, 8);
        let d: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let g = random_graph(14, seed, stencil(k), 0.5);
                distance_field(&g, &[src]).unwrap().dist
            })
            .collect();
        for ((four, eight), sixteen) in d[0].iter().zip(&d[1]).zip(&d[2]) {
            prop_assert!(four >= eight && eight >= sixteen);
        }
    }

    #[test]
    fn locality(seed in any::<u64>(), other in any::<u64>(), x0 in 0usize..5, y0 in 0usize..5) {
        let g = random_graph(14, seed, Stencil::Eight, 0.5);
        let noise = random_graph(14, other, Stencil::Eight, 0.5);
        let inside = move |v: Vertex| v.ix >= x0 && v.ix < x0 + 8 && v.iy >= y0 && v.iy < y0 + 7;
        let mut w = g.weights.clone();
        for (i, x) in w.iter_mut().enumerate() {
            if !inside(g.vertex(i)) {
                *x = noise.weights[i];
            }
        }
        let local = MetricGraph { weights: w, ..g.clone() };
        let (u, v) = (Vertex::new(x0, y0 + 1), Vertex::new(x0 + 7, y0 + 6));
        let full = internal_distance(&g, u, v, inside).unwrap();
        prop_assert_eq!(full, internal_distance(&local, u, v, inside).unwrap());
        prop_assert!(full >= point_distance(&g, u, v).unwrap());
    }
}

fn flat(n: usize, stencil: Stencil) -> MetricGraph {
    MetricGraph::from_weights(n, n, 1.0, vec![1.0; n * n], stencil, 1.0).unwrap()
}

#[test]
fn internal_distance_constructions() {
    let g = flat(16, Stencil::Eight);
    let (u, v) = (Vertex::new(2, 3), Vertex::new(12, 9));
    let direct = point_distance(&g, u, v).unwrap();
    assert_eq!(internal_distance(&g, u, v, |_| true).unwrap(), direct);
    // A full column between u and v disconnects them.
    assert_eq!(
        internal_distance(&g, u, v, |x| x.ix != 7).unwrap(),
        f64::INFINITY
    );
    // Removing a vertex off the deterministic geodesic changes nothing.
    let df = distance_field(&g, &[u]).unwrap();
    let path = trace_geodesic(&df, v).unwrap();
    let hole = Vertex::new(2, 12);
    assert!(!path.vertices.contains(&hole));
    assert_eq!(internal_distance(&g, u, v, |x| x != hole).unwrap(), direct);
}

#[test]
fn zero_field_chamfer_geometry() {
    let g = flat(8, Stencil::Eight);
    let d = point_distance(&g, Vertex::new(0, 0), Vertex::new(3, 4)).unwrap();
    assert!((d - (1.0 + 3.0 * 2f64.sqrt())).abs() < 1e-12);
    let path = trace_geodesic(
        &distance_field(&g, &[Vertex::new(0, 0)]).unwrap(),
        Vertex::new(3, 4),
    )
    .unwrap();
    assert_eq!(path.vertices.len() - 1, 4);
    let four = flat(8, Stencil::Four);
    let ratio = point_distance(&four, Vertex::new(0, 0), Vertex::new(5, 5)).unwrap()
        / point_distance(&g, Vertex::new(0, 0), Vertex::new(5, 5)).unwrap();
    assert!((ratio - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(
        point_distance(&four, Vertex::new(0, 2), Vertex::new(6, 2)).unwrap(),
        point_distance(&g, Vertex::new(0, 2), Vertex::new(6, 2)).unwrap()
    );
}
