//! Metric balls, filled metric balls and Euclidean hitting radii.

use std::collections::VecDeque;
use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::Vertex;
use crate::metric::{DistanceField, MetricGraph};

/// Subset of the window vertices, by local index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    members: Vec<bool>,
    count: usize,
}

impl VertexSet {
    pub fn from_mask(members: Vec<bool>) -> Self {
        let count = members.iter().filter(|&&b| b).count();
        VertexSet { members, count }
    }

    pub fn contains(&self, local: usize) -> bool {
        self.members[local]
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    /// Local indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(&a, &b)| !a || b)
    }
}

#[derive(Debug, Clone)]
pub struct FilledBall {
    pub center: Vertex,
    pub radius: f64,
    /// The closed ball plus every complementary component away from the window edge.
    pub vertices: VertexSet,
    /// Members with a stencil neighbour outside the set, increasing local index.
    pub boundary: Vec<usize>,
}

impl FilledBall {
    /// CSV `ix,iy,dist,in_fill` over the bounding box of the fill, one vertex of margin.
    pub fn write_csv(&self, dfield: &DistanceField<'_>, mut w: impl Write) -> Result<()> {
        let g = dfield.graph;
        let width = g.width();
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        for i in self.vertices.iter() {
            let (x, y) = (i % width, i / width);
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        writeln!(w, "ix,iy,dist,in_fill")?;
        for y in y0.saturating_sub(1)..=(y1 + 1).min(g.height() - 1) {
            for x in x0.saturating_sub(1)..=(x1 + 1).min(width - 1) {
                let i = y * width + x;
                let v = g.vertex(i);
                writeln!(
                    w,
                    "{},{},{},{}",
                    v.ix,
                    v.iy,
                    dfield.dist[i],
                    u8::from(self.vertices.contains(i))
                )?;
            }
        }
        Ok(())
    }
}

fn single_source(dfield: &DistanceField<'_>) -> Result<usize> {
    match dfield.sources.as_slice() {
        [s] => Ok(*s),
        _ => Err(Error::Invalid(
            "metric balls need a single-source distance field".into(),
        )),
    }
}

/// Closed ball `{v : dist(v) <= s}`.
pub fn metric_ball(dfield: &DistanceField<'_>, s: f64) -> Result<VertexSet> {
    single_source(dfield)?;
    if !(s >= 0.0) {
        return Err(Error::Domain {
            name: "s",
            value: s,
            expected: "s >= 0",
        });
    }
    Ok(VertexSet::from_mask(
        dfield.dist.iter().map(|&d| d <= s).collect(),
    ))
}

/// Members of `set` having a stencil neighbour outside it.
pub fn inner_boundary(graph: &MetricGraph, set: &VertexSet) -> Vec<usize> {
    let steps = graph.stencil.offsets();
    set.iter()
        .filter(|&u| {
            steps
                .iter()
                .any(|&(dx, dy)| graph.offset(u, dx, dy).is_some_and(|v| !set.contains(v)))
        })
        .collect()
}

/// Fills every complementary component (stencil adjacency) that does not
/// reach the window edge.
pub fn fill_holes(graph: &MetricGraph, set: &VertexSet) -> VertexSet {
    let n = graph.len();
    let steps = graph.stencil.offsets();
    let mut outside = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n)
        .filter(|&u| graph.on_window_boundary(u) && !set.contains(u))
        .collect();
    for &u in &queue {
        outside[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &(dx, dy) in steps {
            if let Some(v) = graph.offset(u, dx, dy) {
                if !outside[v] && !set.contains(v) {
                    outside[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    VertexSet::from_mask(outside.into_iter().map(|o| !o).collect())
}

/// The filled metric ball `B•_s`: ball plus bounded complementary components.
pub fn filled_metric_ball(dfield: &DistanceField<'_>, s: f64) -> Result<FilledBall> {
    let center = single_source(dfield)?;
    let graph = dfield.graph;
    let ball = metric_ball(dfield, s)?;
    if let Some(u) = ball.iter().find(|&u| graph.on_window_boundary(u)) {
        let v = graph.vertex(u);
        return Err(Error::Geometry(format!(
            "ball of radius {s} touches the window boundary at ({}, {})",
            v.ix, v.iy
        )));
    }
    let vertices = fill_holes(graph, &ball);
    let boundary = inner_boundary(graph, &vertices);
    Ok(FilledBall {
        center: graph.vertex(center),
        radius: s,
        vertices,
        boundary,
    })
}

/// `D(z, complement of the Euclidean r-disc)`: minimum distance over
/// vertices at Euclidean distance at least `r - spacing/2` from the centre.
pub fn hitting_radius(dfield: &DistanceField<'_>, r: f64) -> Result<f64> {
    let center = single_source(dfield)?;
    let graph = dfield.graph;
    let (cx, cy) = graph.position(center);
    let h = graph.spacing;
    let (wx0, wy0) = graph.position(0);
    let (wx1, wy1) = graph.position(graph.len() - 1);
    let reach = r + h;
    if !(r > 0.0) || cx - reach < wx0 || cy - reach < wy0 || cx + reach > wx1 || cy + reach > wy1 {
        return Err(Error::Geometry(format!(
            "circle of radius {r} around ({cx}, {cy}) leaves the window"
        )));
    }
    let threshold = r - 0.5 * h;
    let best = (0..graph.len())
        .filter(|&u| {
            let (x, y) = graph.position(u);
            ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() >= threshold
        })
        .map(|u| dfield.dist[u])
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{distance_field, Stencil};

    fn flat(n: usize) -> MetricGraph {
        MetricGraph::from_weights(n, n, 1.0, vec![1.0; n * n], Stencil::Eight, 1.0).unwrap()
    }

    #[test]
    fn ball_basics() {
        let g = flat(21);
        let c = Vertex::new(10, 10);
        let df = distance_field(&g, &[c]).unwrap();
        let b0 = metric_ball(&df, 0.0).unwrap();
        assert_eq!(b0.iter().collect::<Vec<_>>(), vec![g.local(c).unwrap()]);
        let b1 = metric_ball(&df, 3.0).unwrap();
        let b2 = metric_ball(&df, 5.5).unwrap();
        assert!(b1.is_subset(&b2));
        // chamfer octagon: (2,1) has distance 1 + sqrt 2 <= 3, (3,1) does not
        assert!(b1.contains(g.local(Vertex::new(12, 11)).unwrap()));
        assert!(!b1.contains(g.local(Vertex::new(13, 11)).unwrap()));
        let filled = filled_metric_ball(&df, 3.0).unwrap();
        assert_eq!(filled.vertices, b1);
        assert!(filled
            .boundary
            .iter()
            .all(|&u| df.dist[u] > 3.0 - 2f64.sqrt() - 1e-12));
    }

    #[test]
    fn window_contact_is_an_error() {
        let g = flat(11);
        let df = distance_field(&g, &[Vertex::new(5, 5)]).unwrap();
        assert!(matches!(
            filled_metric_ball(&df, 5.0),
            Err(Error::Geometry(_))
        ));
        assert!(filled_metric_ball(&df, 4.5).is_ok());
    }

    #[test]
    fn multi_source_rejected() {
        let g = flat(11);
        let df = distance_field(&g, &[Vertex::new(5, 5), Vertex::new(1, 1)]).unwrap();
        assert!(metric_ball(&df, 1.0).is_err());
    }

    #[test]
    fn hitting_radius_zero_field() {
        let g = flat(41);
        let df = distance_field(&g, &[Vertex::new(20, 20)]).unwrap();
        let mut last = 0.0;
        for r in [2.0, 5.0, 7.5, 12.0, 18.0] {
            let t = hitting_radius(&df, r).unwrap();
            assert!(
                t >= r * 2.0 / (1.0 + 2f64.sqrt()) - 1.0 && t <= r + 1.0,
                "{r}: {t}"
            );
            assert!(t >= last);
            last = t;
        }
        assert!(hitting_radius(&df, 20.0).is_err());
    }
}
