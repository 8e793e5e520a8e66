//! Empirical bi-Lipschitz constants between two metrics on the same window.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::Vertex;
use crate::metric::{distance_field, MetricGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub pair_id: usize,
    pub u: Vertex,
    pub v: Vertex,
    /// Euclidean separation.
    pub sep: f64,
    pub da: f64,
    pub db: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiLipReport {
    pub beta: f64,
    pub pairs: Vec<PairRecord>,
    /// Estimate of the optimal lower constant `c*`.
    pub min_ratio: f64,
    /// Estimate of the optimal upper constant `C*`.
    pub max_ratio: f64,
}

fn check_same_window(a: &MetricGraph, b: &MetricGraph) -> Result<()> {
    if a.window != b.window || a.spacing != b.spacing {
        return Err(Error::Invalid("graphs do not share a window".into()));
    }
    Ok(())
}

/// `D_b / D_a` over the given pairs, one search per distinct first vertex.
pub fn bilipschitz_on_pairs(
    graph_a: &MetricGraph,
    graph_b: &MetricGraph,
    pairs: &[(Vertex, Vertex)],
    beta: f64,
) -> Result<BiLipReport> {
    check_same_window(graph_a, graph_b)?;
    if pairs.is_empty() {
        return Err(Error::Invalid("no pairs".into()));
    }
    let mut records = Vec::with_capacity(pairs.len());
    let mut start = 0;
    while start < pairs.len() {
        let u = pairs[start].0;
        let end = start + pairs[start..].iter().take_while(|p| p.0 == u).count();
        let da = distance_field(graph_a, &[u])?;
        let db = distance_field(graph_b, &[u])?;
        for (k, &(_, v)) in pairs[start..end].iter().enumerate() {
            let (da, db) = (da.dist_at(v).unwrap(), db.dist_at(v).unwrap());
            let dx = (v.ix as f64 - u.ix as f64) * graph_a.spacing;
            let dy = (v.iy as f64 - u.iy as f64) * graph_a.spacing;
            records.push(PairRecord {
                pair_id: start + k,
                u,
                v,
                sep: dx.hypot(dy),
                da,
                db,
                ratio: db / da,
            });
        }
        start = end;
    }
    let min_ratio = records
        .iter()
        .map(|r| r.ratio)
        .fold(f64::INFINITY, f64::min);
    let max_ratio = records.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(BiLipReport {
        beta,
        pairs: records,
        min_ratio,
        max_ratio,
    })
}

/// Uniform pairs with separation at least `beta` times the window side,
/// eight targets per sampled source.
pub fn sample_pairs(
    graph: &MetricGraph,
    beta: f64,
    pairs: usize,
    seed: u64,
) -> Result<Vec<(Vertex, Vertex)>> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain {
            name: "beta",
            value: beta,
            expected: "0 < beta < 1",
        });
    }
    let side = (graph.width().min(graph.height()) - 1) as f64;
    let min_sep = beta * side;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(pairs);
    while out.len() < pairs {
        let u = rng.random_range(0..graph.len());
        let mut found = 0;
        let mut tries = 0;
        while found < 8 && out.len() < pairs && tries < 1000 {
            tries += 1;
            let v = rng.random_range(0..graph.len());
            let (ux, uy) = ((u % graph.width()) as f64, (u / graph.width()) as f64);
            let (vx, vy) = ((v % graph.width()) as f64, (v / graph.width()) as f64);
            if (ux - vx).hypot(uy - vy) >= min_sep {
                out.push((graph.vertex(u), graph.vertex(v)));
                found += 1;
            }
        }
    }
    Ok(out)
}

pub fn bilipschitz_estimate(
    graph_a: &MetricGraph,
    graph_b: &MetricGraph,
    beta: f64,
    pairs: usize,
    seed: u64,
) -> Result<BiLipReport> {
    check_same_window(graph_a, graph_b)?;
    let sampled = sample_pairs(graph_a, beta, pairs, seed)?;
    bilipschitz_on_pairs(graph_a, graph_b, &sampled, beta)
}
