use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::Write;

use super::MetricGraph;
use crate::error::{Error, Result};
use crate::grid::Vertex;

const NO_PRED: u32 = u32::MAX;

/// Shortest-path distances and tree from a source set.
#[derive(Debug, Clone)]
pub struct DistanceField<'g> {
    pub graph: &'g MetricGraph,
    /// Local source indices.
    pub sources: Vec<usize>,
    /// Local row-major distances; `INFINITY` where unreachable.
    pub dist: Vec<f64>,
    pred: Vec<u32>,
}

impl<'g> DistanceField<'g> {
    pub fn predecessor(&self, local: usize) -> Option<usize> {
        match self.pred[local] {
            NO_PRED => None,
            p => Some(p as usize),
        }
    }

    pub fn dist_at(&self, v: Vertex) -> Option<f64> {
        self.graph.local(v).map(|i| self.dist[i])
    }

    /// CSV with header `ix,iy,dist` in local row-major order.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "ix,iy,dist")?;
        for (i, d) in self.dist.iter().enumerate() {
            let v = self.graph.vertex(i);
            writeln!(w, "{},{},{}", v.ix, v.iy, d)?;
        }
        Ok(())
    }
}

/// A path from a source to a target along the shortest-path tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    /// Source first.
    pub vertices: Vec<Vertex>,
    /// Distance of each vertex from the source set.
    pub cumulative: Vec<f64>,
    pub length: f64,
}

impl Geodesic {
    /// CSV with header `step,ix,iy,cumulative_length`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "step,ix,iy,cumulative_length")?;
        for (k, (v, c)) in self.vertices.iter().zip(&self.cumulative).enumerate() {
            writeln!(w, "{},{},{},{}", k, v.ix, v.iy, c)?;
        }
        Ok(())
    }
}

/// Heap key. Non-negative doubles order like their bit patterns.
#[inline]
fn key(d: f64) -> u64 {
    d.to_bits()
}

struct Search<'a> {
    graph: &'a MetricGraph,
    mask: Option<&'a [bool]>,
    dist: Vec<f64>,
    pred: Vec<u32>,
    done: Vec<bool>,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
}

impl<'a> Search<'a> {
    fn new(graph: &'a MetricGraph, mask: Option<&'a [bool]>, sources: &[usize]) -> Self {
        let n = graph.len();
        let mut s = Search {
            graph,
            mask,
            dist: vec![f64::INFINITY; n],
            pred: vec![NO_PRED; n],
            done: vec![false; n],
            heap: BinaryHeap::new(),
        };
        for &src in sources {
            if s.dist[src] != 0.0 {
                s.dist[src] = 0.0;
                s.heap.push(Reverse((key(0.0), src as u32)));
            }
        }
        s
    }

    /// Settles vertices in distance order until `stop` accepts one (returned)
    /// or the heap empties.
    fn run(&mut self, mut stop: impl FnMut(usize) -> bool) -> Option<usize> {
        let graph = self.graph;
        let steps = graph.steps();
        let w = graph.window.width as i64;
        let h = graph.window.height as i64;
        while let Some(Reverse((_, u))) = self.heap.pop() {
            let u = u as usize;
            if self.done[u] {
                continue;
            }
            self.done[u] = true;
            if stop(u) {
                return Some(u);
            }
            let du = self.dist[u];
            let wu = graph.weights[u];
            let (x, y) = ((u as i64) % w, (u as i64) / w);
            for s in &steps {
                let nx = x + s.dx as i64;
                let ny = y + s.dy as i64;
                if nx < 0 || nx >= w || ny < 0 || ny >= h {
                    continue;
                }
                let v = (ny * w + nx) as usize;
                if self.done[v] {
                    continue;
                }
                if let Some(mask) = self.mask {
                    if !mask[v] {
                        continue;
                    }
                }
                let nd = du + s.length * 0.5 * (wu + graph.weights[v]);
                if nd < self.dist[v] {
                    self.dist[v] = nd;
                    self.pred[v] = u as u32;
                    self.heap.push(Reverse((key(nd), v as u32)));
                } else if nd == self.dist[v] && (u as u32) < self.pred[v] {
                    self.pred[v] = u as u32;
                }
            }
        }
        None
    }
}

fn source_indices(graph: &MetricGraph, sources: &[Vertex]) -> Result<Vec<usize>> {
    if sources.is_empty() {
        return Err(Error::Invalid("source set is empty".into()));
    }
    sources.iter().map(|&v| graph.local_or_err(v)).collect()
}

/// Exact multi-source shortest-path distances. Among equal-length
/// predecessors the one with the smallest local index wins.
pub fn distance_field<'g>(graph: &'g MetricGraph, sources: &[Vertex]) -> Result<DistanceField<'g>> {
    let src = source_indices(graph, sources)?;
    Ok(run_full(graph, None, src))
}

/// As [`distance_field`], restricted to vertices with `mask[local] == true`.
pub fn distance_field_masked<'g>(
    graph: &'g MetricGraph,
    sources: &[Vertex],
    mask: &[bool],
) -> Result<DistanceField<'g>> {
    let src = source_indices(graph, sources)?;
    if mask.len() != graph.len() {
        return Err(Error::Invalid("mask length differs from graph size".into()));
    }
    for &s in &src {
        if !mask[s] {
            let v = graph.vertex(s);
            return Err(Error::Predicate(v.ix, v.iy));
        }
    }
    Ok(run_full(graph, Some(mask), src))
}

fn run_full<'g>(
    graph: &'g MetricGraph,
    mask: Option<&[bool]>,
    src: Vec<usize>,
) -> DistanceField<'g> {
    let mut search = Search::new(graph, mask, &src);
    search.run(|_| false);
    DistanceField {
        graph,
        sources: src,
        dist: search.dist,
        pred: search.pred,
    }
}

/// First vertex with `target[local]` settled from the sources, and its distance.
/// Stops as soon as it is found.
pub fn first_hit(
    graph: &MetricGraph,
    sources: &[usize],
    target: &[bool],
    mask: Option<&[bool]>,
) -> Option<(usize, f64)> {
    let mut search = Search::new(graph, mask, sources);
    search.run(|u| target[u]).map(|u| (u, search.dist[u]))
}

/// Distances from `source` to each of `targets`; stops once all are settled.
pub fn distances_to(graph: &MetricGraph, source: usize, targets: &[usize]) -> Vec<f64> {
    let mut pending = vec![false; graph.len()];
    targets.iter().for_each(|&t| pending[t] = true);
    let mut left = pending.iter().filter(|&&b| b).count();
    let mut search = Search::new(graph, None, &[source]);
    search.run(|u| {
        if pending[u] {
            pending[u] = false;
            left -= 1;
        }
        left == 0
    });
    targets.iter().map(|&t| search.dist[t]).collect()
}

/// `D(u, v)`; stops the search at `v`.
pub fn point_distance(graph: &MetricGraph, u: Vertex, v: Vertex) -> Result<f64> {
    let a = graph.local_or_err(u)?;
    let b = graph.local_or_err(v)?;
    let mut target = vec![false; graph.len()];
    target[b] = true;
    Ok(first_hit(graph, &[a], &target, None).map_or(f64::INFINITY, |(_, d)| d))
}

/// Distance using only vertices inside `region`; infinite if disconnected there.
pub fn internal_distance(
    graph: &MetricGraph,
    u: Vertex,
    v: Vertex,
    region: impl Fn(Vertex) -> bool,
) -> Result<f64> {
    let a = graph.local_or_err(u)?;
    let b = graph.local_or_err(v)?;
    for w in [u, v] {
        if !region(w) {
            return Err(Error::Predicate(w.ix, w.iy));
        }
    }
    let mask: Vec<bool> = (0..graph.len()).map(|i| region(graph.vertex(i))).collect();
    let mut target = vec![false; graph.len()];
    target[b] = true;
    Ok(first_hit(graph, &[a], &target, Some(&mask)).map_or(f64::INFINITY, |(_, d)| d))
}

/// Walks the predecessor tree from `target` back to a source.
pub fn trace_geodesic(dfield: &DistanceField<'_>, target: Vertex) -> Result<Geodesic> {
    let t = dfield.graph.local_or_err(target)?;
    if !dfield.dist[t].is_finite() {
        return Err(Error::Unreachable(target.ix, target.iy));
    }
    let mut locals = vec![t];
    let mut cur = t;
    while let Some(p) = dfield.predecessor(cur) {
        locals.push(p);
        cur = p;
    }
    locals.reverse();
    Ok(Geodesic {
        vertices: locals.iter().map(|&i| dfield.graph.vertex(i)).collect(),
        cumulative: locals.iter().map(|&i| dfield.dist[i]).collect(),
        length: dfield.dist[t],
    })
}
