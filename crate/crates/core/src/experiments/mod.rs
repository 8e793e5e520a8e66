//! Replica-level experiments and the reports they aggregate into.
//!
//! Every experiment is a deterministic function of its configuration and a
//! root seed: replica `i` uses [`crate::seed::task_seed`]`(seed0, name, i)`,
//! replicas run in parallel, and results are collected in replica order.

pub mod bilip;
pub mod crossing;
pub mod fit;
pub mod holder;
pub mod rotation;
pub mod tightness;

pub use bilip::{bilipschitz_estimate, bilipschitz_on_pairs, BiLipReport, PairRecord};
pub use crossing::{crossing_median, crossing_study, CrossingLevel, CrossingReport};
pub use fit::{fit_exponent, FitLevel, FitReport};
pub use holder::{holder_scan, HolderReport};
pub use rotation::{rotation_anisotropy, RotationLevel, RotationReport};
pub use tightness::{tightness_compare, TightnessReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Rect;
use crate::metric::{first_hit, MetricGraph};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Left side to right side.
    Horizontal,
    /// Bottom side to top side.
    Vertical,
}

/// Local column/row range of `rect` in the graph's window.
fn rect_range(graph: &MetricGraph, rect: &Rect) -> Result<(usize, usize, usize, usize)> {
    let h = graph.spacing;
    let w = &graph.window;
    let to_local = |coord: f64, origin: usize, len: usize| -> Result<usize> {
        let i = (coord / h).round() as i64 - origin as i64;
        if i < 0 || i >= len as i64 {
            Err(Error::Geometry(format!(
                "rectangle {rect:?} leaves the window"
            )))
        } else {
            Ok(i as usize)
        }
    };
    Ok((
        to_local(rect.x0, w.ix0, w.width)?,
        to_local(rect.y0, w.iy0, w.height)?,
        to_local(rect.x1, w.ix0, w.width)?,
        to_local(rect.y1, w.iy0, w.height)?,
    ))
}

/// Distance between opposite sides of `rect`; paths may use the whole window.
pub fn crossing_distance(graph: &MetricGraph, rect: &Rect, direction: Direction) -> Result<f64> {
    let (x0, y0, x1, y1) = rect_range(graph, rect)?;
    let width = graph.width();
    let mut target = vec![false; graph.len()];
    let sources: Vec<usize> = match direction {
        Direction::Horizontal => {
            (y0..=y1).for_each(|y| target[y * width + x1] = true);
            (y0..=y1).map(|y| y * width + x0).collect()
        }
        Direction::Vertical => {
            (x0..=x1).for_each(|x| target[y1 * width + x] = true);
            (x0..=x1).map(|x| y0 * width + x).collect()
        }
    };
    first_hit(graph, &sources, &target, None)
        .map(|(_, d)| d)
        .ok_or_else(|| Error::Geometry("opposite side unreachable".into()))
}

/// Replica seeds for an experiment, failing on a (hash) collision.
pub fn replica_seeds(seed0: u64, experiment: &str, replicas: usize) -> Result<Vec<u64>> {
    seed::replica_seeds(seed0, experiment, replicas).ok_or_else(|| {
        Error::Invalid(format!(
            "seed collision among {replicas} replicas of {experiment}"
        ))
    })
}
