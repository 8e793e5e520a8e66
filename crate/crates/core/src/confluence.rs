//! Confluence of geodesics across a metric annulus, measured on the
//! shortest-path tree rooted at the centre.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::balls::{filled_metric_ball, hitting_radius, FilledBall};
use crate::error::{Error, Result};
use crate::experiments::replica_seeds;
use crate::field::{sample_field, Normalization};
use crate::grid::{GridSpec, Vertex};
use crate::metric::{build_graph, distance_field, DistanceField, Stencil};
use crate::mollify::mollify;
use crate::params::Parameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Targets {
    AllBoundary,
    /// `m` boundary vertices drawn without replacement.
    Sample {
        m: usize,
        seed: u64,
    },
}

impl Targets {
    pub fn tag(&self) -> String {
        match self {
            Targets::AllBoundary => "all_boundary".into(),
            Targets::Sample { m, .. } => format!("sample{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfluenceEntry {
    pub s: f64,
    pub t: f64,
    pub targets_per_t: usize,
    pub ancestor_count: usize,
    /// Distinct exit vertices on the inner filled-ball boundary, sorted.
    pub ancestors: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfluenceReport {
    pub seed: u64,
    pub center: Vertex,
    pub s: f64,
    pub entries: Vec<ConfluenceEntry>,
    pub targets: Targets,
}

/// Follows the tree from `target` towards the centre and returns the last
/// vertex of the centre-to-target path inside `inner`.
fn exit_vertex(dfield: &DistanceField<'_>, inner: &FilledBall, target: usize) -> usize {
    let mut cur = target;
    while !inner.vertices.contains(cur) {
        cur = dfield
            .predecessor(cur)
            .expect("the tree path reaches the centre, which lies in the inner ball");
    }
    cur
}

/// Counts the distinct points where tree geodesics to targets on `∂B•_t`
/// leave `B•_s`.
pub fn confluence_statistic(
    dfield: &DistanceField<'_>,
    s: f64,
    t: f64,
    targets: Targets,
) -> Result<ConfluenceEntry> {
    if !(s > 0.0 && s < t) {
        return Err(Error::Invalid(format!(
            "need 0 < s < t, got s = {s}, t = {t}"
        )));
    }
    let inner = filled_metric_ball(dfield, s)?;
    let outer = filled_metric_ball(dfield, t)?;
    let chosen: Vec<usize> = match targets {
        Targets::AllBoundary => outer.boundary.clone(),
        Targets::Sample { m, seed } => {
            if m == 0 || m > outer.boundary.len() {
                return Err(Error::Invalid(format!(
                    "cannot sample {m} of {} boundary vertices",
                    outer.boundary.len()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picks: Vec<usize> = index::sample(&mut rng, outer.boundary.len(), m)
                .into_iter()
                .map(|i| outer.boundary[i])
                .collect();
            picks.sort_unstable();
            picks
        }
    };
    let mut exits: Vec<usize> = chosen
        .iter()
        .map(|&u| exit_vertex(dfield, &inner, u))
        .collect();
    exits.sort_unstable();
    exits.dedup();
    Ok(ConfluenceEntry {
        s,
        t,
        targets_per_t: chosen.len(),
        ancestor_count: exits.len(),
        ancestors: exits.iter().map(|&u| dfield.graph.vertex(u)).collect(),
    })
}

/// One entry per outer radius in `ts`.
pub fn confluence_report(
    dfield: &DistanceField<'_>,
    seed: u64,
    s: f64,
    ts: &[f64],
    targets: Targets,
) -> Result<ConfluenceReport> {
    let center = match dfield.sources.as_slice() {
        [c] => dfield.graph.vertex(*c),
        _ => return Err(Error::Invalid("confluence needs a single centre".into())),
    };
    let entries = ts
        .iter()
        .map(|&t| confluence_statistic(dfield, s, t, targets))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConfluenceReport {
        seed,
        center,
        s,
        entries,
        targets,
    })
}

pub const EXPERIMENT: &str = "confluence";

/// Replica settings for [`confluence_ensemble`]. Radii are Euclidean and
/// converted to metric radii through the hitting radius `tau_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfluenceSetup {
    pub eps: f64,
    pub inner_r: f64,
    pub outer_r: Vec<f64>,
    pub stencil: Stencil,
    pub targets: Targets,
}

/// One report per replica, centred at the window centre on a mean-zero
/// field, with `s = tau_{inner_r}` and `t = tau_r` for each outer radius.
pub fn confluence_ensemble(
    params: &Parameters,
    grid: &GridSpec,
    setup: &ConfluenceSetup,
    replicas: usize,
    seed0: u64,
) -> Result<Vec<ConfluenceReport>> {
    let seeds = replica_seeds(seed0, EXPERIMENT, replicas)?;
    let (cx, cy) = grid.window.center();
    let center = grid.nearest_vertex(cx, cy)?;
    seeds
        .par_iter()
        .map(|&seed| {
            let f = sample_field(grid, seed, Normalization::MeanZero)?;
            let g = build_graph(&mollify(&f, setup.eps)?, params.xi, setup.stencil, 1.0)?;
            let df = distance_field(&g, &[center])?;
            let s = hitting_radius(&df, setup.inner_r)?;
            let ts = setup
                .outer_r
                .iter()
                .map(|&r| hitting_radius(&df, r))
                .collect::<Result<Vec<_>>>()?;
            confluence_report(&df, seed, s, &ts, setup.targets)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balls::filled_metric_ball;
    use crate::metric::MetricGraph;
    use crate::params::{derive_params, GAMMA_PURE_GRAVITY};
    use rand::Rng;

    fn random_graph(n: usize, seed: u64) -> MetricGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = (0..n * n).map(|_| rng.random_range(0.2..5.0)).collect();
        MetricGraph::from_weights(n, n, 1.0, w, Stencil::Eight, 1.0).unwrap()
    }

    #[test]
    fn single_target_has_one_ancestor() {
        let g = random_graph(41, 1);
        let df = distance_field(&g, &[Vertex::new(20, 20)]).unwrap();
        let e = confluence_statistic(&df, 8.0, 20.0, Targets::Sample { m: 1, seed: 3 }).unwrap();
        assert_eq!((e.targets_per_t, e.ancestor_count), (1, 1));
    }

    #[test]
    fn ancestors_are_nested_and_on_inner_boundary() {
        for seed in 0..5 {
            let g = random_graph(81, seed);
            let df = distance_field(&g, &[Vertex::new(40, 40)]).unwrap();
            let rep = confluence_report(&df, seed, 4.0, &[8.0, 12.0, 16.0], Targets::AllBoundary)
                .unwrap();
            let inner = filled_metric_ball(&df, 4.0).unwrap();
            for pair in rep.entries.windows(2) {
                assert!(pair[1]
                    .ancestors
                    .iter()
                    .all(|a| pair[0].ancestors.contains(a)));
            }
            for e in &rep.entries {
                assert!(e.ancestor_count <= e.targets_per_t);
                for a in &e.ancestors {
                    assert!(inner.boundary.contains(&g.local(*a).unwrap()));
                }
            }
        }
    }

    #[test]
    fn invalid_radii() {
        let g = random_graph(21, 0);
        let df = distance_field(&g, &[Vertex::new(10, 10)]).unwrap();
        assert!(confluence_statistic(&df, 3.0, 2.0, Targets::AllBoundary).is_err());
    }

    #[test]
    fn ensemble_is_deterministic() {
        let grid = GridSpec::new(64, 2.0).unwrap();
        let p = derive_params(GAMMA_PURE_GRAVITY, 4.0).unwrap();
        let setup = ConfluenceSetup {
            eps: 0.0625,
            inner_r: 0.15,
            outer_r: vec![0.3, 0.35],
            stencil: Stencil::Eight,
            targets: Targets::AllBoundary,
        };
        let a = confluence_ensemble(&p, &grid, &setup, 3, 5).unwrap();
        assert_eq!(a, confluence_ensemble(&p, &grid, &setup, 3, 5).unwrap());
        assert!(a
            .iter()
            .all(|r| r.entries.len() == 2 && r.entries[0].ancestor_count >= 1));
    }
}
