//! The discrete LFPP metric: vertex weights `exp(xi * h*_eps)` on the window
//! lattice, trapezoidal edge costs, and Dijkstra-based distances.

mod dijkstra;

pub use dijkstra::{
    distance_field, distance_field_masked, distances_to, first_hit, internal_distance,
    point_distance, trace_geodesic, DistanceField, Geodesic,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Vertex, WindowIndex};
use crate::mollify::MollifiedField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    Four,
    Eight,
    /// Eight plus the knight moves `(±1, ±2)`, `(±2, ±1)`.
    Sixteen,
}

impl Stencil {
    pub fn offsets(self) -> &'static [(i32, i32)] {
        const OFFSETS: [(i32, i32); 16] = [
            (1, 0),
            (0, 1),
            (-1, 0),
            (0, -1),
            (1, 1),
            (-1, 1),
            (-1, -1),
            (1, -1),
            (1, 2),
            (2, 1),
            (-1, 2),
            (-2, 1),
            (-1, -2),
            (-2, -1),
            (1, -2),
            (2, -1),
        ];
        match self {
            Stencil::Four => &OFFSETS[..4],
            Stencil::Eight => &OFFSETS[..8],
            Stencil::Sixteen => &OFFSETS[..],
        }
    }
}

impl std::str::FromStr for Stencil {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "four" | "4" => Ok(Stencil::Four),
            "eight" | "8" => Ok(Stencil::Eight),
            "sixteen" | "16" => Ok(Stencil::Sixteen),
            other => Err(Error::Invalid(format!("unknown stencil {other:?}"))),
        }
    }
}

/// `sqrt(dx^2 + A dy^2)` in lattice units.
pub fn stretched_length(dx: i32, dy: i32, anisotropy_a: f64) -> f64 {
    let (dx, dy) = (dx as f64, dy as f64);
    (dx * dx + anisotropy_a * dy * dy).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Step {
    pub dx: i32,
    pub dy: i32,
    /// Physical stretched length of the offset.
    pub length: f64,
}

/// Implicit lattice graph over the measurement window. Edges never cross the
/// window boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    pub window: WindowIndex,
    pub spacing: f64,
    pub xi: f64,
    pub stencil: Stencil,
    pub anisotropy_a: f64,
    /// Local row-major vertex weights.
    pub weights: Vec<f64>,
    /// Mollification scale of the source field, if built from one.
    pub eps: Option<f64>,
}

fn check_xi(xi: f64) -> Result<()> {
    if xi.is_finite() && xi > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "xi",
            value: xi,
            expected: "xi > 0",
        })
    }
}

fn check_anisotropy(a: f64) -> Result<()> {
    if a.is_finite() && a >= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "anisotropy_a",
            value: a,
            expected: "anisotropy_a >= 1",
        })
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.iter().all(|w| w.is_finite() && *w > 0.0) {
        Ok(())
    } else {
        Err(Error::Invalid(
            "vertex weights must be finite and strictly positive".into(),
        ))
    }
}

/// Weights `exp(xi * h*_eps(v))` over the window of the mollified field.
pub fn build_graph(
    mollified: &MollifiedField,
    xi: f64,
    stencil: Stencil,
    anisotropy_a: f64,
) -> Result<MetricGraph> {
    check_xi(xi)?;
    check_anisotropy(anisotropy_a)?;
    let window = mollified.spec.window_index();
    let weights: Vec<f64> = (0..window.len())
        .map(|i| (xi * mollified.at(window.global(i))).exp())
        .collect();
    check_weights(&weights)?;
    Ok(MetricGraph {
        window,
        spacing: mollified.spec.spacing(),
        xi,
        stencil,
        anisotropy_a,
        weights,
        eps: Some(mollified.eps),
    })
}

impl MetricGraph {
    /// A `width x height` lattice with explicit weights, origin at `(0, 0)`.
    pub fn from_weights(
        width: usize,
        height: usize,
        spacing: f64,
        weights: Vec<f64>,
        stencil: Stencil,
        anisotropy_a: f64,
    ) -> Result<MetricGraph> {
        check_anisotropy(anisotropy_a)?;
        if weights.len() != width * height || width == 0 || height == 0 {
            return Err(Error::Invalid(format!(
                "expected {} weights, got {}",
                width * height,
                weights.len()
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Invalid("spacing must be positive".into()));
        }
        check_weights(&weights)?;
        Ok(MetricGraph {
            window: WindowIndex {
                ix0: 0,
                iy0: 0,
                width,
                height,
            },
            spacing,
            xi: 1.0,
            stencil,
            anisotropy_a,
            weights,
            eps: None,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn width(&self) -> usize {
        self.window.width
    }

    pub fn height(&self) -> usize {
        self.window.height
    }

    pub fn local(&self, v: Vertex) -> Option<usize> {
        self.window.local(v)
    }

    pub fn vertex(&self, local: usize) -> Vertex {
        self.window.global(local)
    }

    pub(crate) fn local_or_err(&self, v: Vertex) -> Result<usize> {
        self.local(v).ok_or_else(|| {
            Error::Geometry(format!("vertex ({}, {}) is outside the window", v.ix, v.iy))
        })
    }

    pub(crate) fn steps(&self) -> Vec<Step> {
        self.stencil
            .offsets()
            .iter()
            .map(|&(dx, dy)| Step {
                dx,
                dy,
                length: stretched_length(dx, dy, self.anisotropy_a) * self.spacing,
            })
            .collect()
    }

    /// Local index of `u + step`, if inside the window.
    #[inline]
    pub(crate) fn offset(&self, u: usize, dx: i32, dy: i32) -> Option<usize> {
        let w = self.window.width as i64;
        let h = self.window.height as i64;
        let x = (u as i64 % w) + dx as i64;
        let y = (u as i64 / w) + dy as i64;
        if x >= 0 && x < w && y >= 0 && y < h {
            Some((y * w + x) as usize)
        } else {
            None
        }
    }

    /// Stencil neighbours of `u` with their edge costs.
    pub fn neighbors(&self, u: usize) -> Vec<(usize, f64)> {
        self.steps()
            .into_iter()
            .filter_map(|s| {
                self.offset(u, s.dx, s.dy)
                    .map(|v| (v, s.length * 0.5 * (self.weights[u] + self.weights[v])))
            })
            .collect()
    }

    /// Edge cost between stencil neighbours, `None` if not adjacent.
    pub fn edge_cost(&self, u: usize, v: usize) -> Option<f64> {
        self.neighbors(u)
            .into_iter()
            .find(|&(m, _)| m == v)
            .map(|(_, c)| c)
    }

    /// Whether a local vertex lies on the outer ring of the window.
    pub fn on_window_boundary(&self, u: usize) -> bool {
        let (x, y) = (u % self.window.width, u / self.window.width);
        x == 0 || y == 0 || x + 1 == self.window.width || y + 1 == self.window.height
    }

    /// Physical position of a local vertex relative to the lattice origin.
    pub fn position(&self, u: usize) -> (f64, f64) {
        let v = self.vertex(u);
        (v.ix as f64 * self.spacing, v.iy as f64 * self.spacing)
    }
}

/// Multiplies every weight by `exp(xi * f(v))`, i.e. the graph of the field `h + f`.
pub fn weyl_shift(graph: &MetricGraph, f: impl Fn(Vertex) -> f64) -> Result<MetricGraph> {
    let weights: Vec<f64> = graph
        .weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * (graph.xi * f(graph.vertex(i))).exp())
        .collect();
    check_weights(&weights)?;
    Ok(MetricGraph {
        weights,
        ..graph.clone()
    })
}
