//! Torus discretisation and the inset measurement window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle in physical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// A lattice vertex in global torus coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub ix: usize,
    pub iy: usize,
}

impl Vertex {
    pub fn new(ix: usize, iy: usize) -> Self {
        Vertex { ix, iy }
    }
}

/// `n x n` vertices on a torus of physical side `side_length`, with all
/// measurements confined to `window`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub side_length: f64,
    pub window: Rect,
}

/// Inclusive lattice index ranges covered by the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowIndex {
    pub ix0: usize,
    pub iy0: usize,
    pub width: usize,
    pub height: usize,
}

impl WindowIndex {
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major local index of a global vertex, if it lies in the window.
    pub fn local(&self, v: Vertex) -> Option<usize> {
        if v.ix >= self.ix0
            && v.iy >= self.iy0
            && v.ix < self.ix0 + self.width
            && v.iy < self.iy0 + self.height
        {
            Some((v.iy - self.iy0) * self.width + (v.ix - self.ix0))
        } else {
            None
        }
    }

    pub fn global(&self, local: usize) -> Vertex {
        Vertex::new(self.ix0 + local % self.width, self.iy0 + local / self.width)
    }
}

const GEOM_TOL: f64 = 1e-9;

impl GridSpec {
    /// Grid with the default window, inset by `side_length/4` on every side.
    pub fn new(n: usize, side_length: f64) -> Result<Self> {
        let q = side_length / 4.0;
        let spec = GridSpec {
            n,
            side_length,
            window: Rect::new(q, q, side_length - q, side_length - q),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_window(n: usize, side_length: f64, window: Rect) -> Result<Self> {
        let spec = GridSpec {
            n,
            side_length,
            window,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::Grid(format!(
                "n = {} must be a power of two >= 8",
                self.n
            )));
        }
        if !(self.side_length.is_finite() && self.side_length > 0.0) {
            return Err(Error::Grid(format!(
                "side_length = {} must be positive",
                self.side_length
            )));
        }
        let w = &self.window;
        let buf = self.side_length / 4.0 - GEOM_TOL * self.side_length;
        if !(w.x1 > w.x0 && w.y1 > w.y0) {
            return Err(Error::Grid("window is empty".into()));
        }
        if w.x0 < buf
            || w.y0 < buf
            || self.side_length - w.x1 < buf
            || self.side_length - w.y1 < buf
        {
            return Err(Error::Grid(format!(
                "window {:?} is not inset by side_length/4 = {}",
                w,
                self.side_length / 4.0
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.side_length / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Row-major index `iy * n + ix`.
    pub fn index(&self, v: Vertex) -> usize {
        v.iy * self.n + v.ix
    }

    pub fn position(&self, v: Vertex) -> (f64, f64) {
        let h = self.spacing();
        (v.ix as f64 * h, v.iy as f64 * h)
    }

    /// Nearest lattice vertex to a physical point (no wrapping).
    pub fn nearest_vertex(&self, x: f64, y: f64) -> Result<Vertex> {
        let h = self.spacing();
        let ix = (x / h).round();
        let iy = (y / h).round();
        if ix < 0.0 || iy < 0.0 || ix >= self.n as f64 || iy >= self.n as f64 {
            return Err(Error::Geometry(format!(
                "point ({x}, {y}) lies outside the fundamental domain"
            )));
        }
        Ok(Vertex::new(ix as usize, iy as usize))
    }

    pub fn window_index(&self) -> WindowIndex {
        let h = self.spacing();
        let w = &self.window;
        let ix0 = (w.x0 / h - GEOM_TOL).ceil().max(0.0) as usize;
        let iy0 = (w.y0 / h - GEOM_TOL).ceil().max(0.0) as usize;
        let ix1 = (w.x1 / h + GEOM_TOL).floor() as usize;
        let iy1 = (w.y1 / h + GEOM_TOL).floor() as usize;
        WindowIndex {
            ix0,
            iy0,
            width: ix1 + 1 - ix0,
            height: iy1 + 1 - iy0,
        }
    }

    /// Whether a Euclidean disc lies in the window (closed).
    pub fn disc_in_window(&self, center: (f64, f64), radius: f64) -> bool {
        let w = &self.window;
        let tol = GEOM_TOL * self.side_length;
        center.0 - radius >= w.x0 - tol
            && center.0 + radius <= w.x1 + tol
            && center.1 - radius >= w.y0 - tol
            && center.1 + radius <= w.y1 + tol
    }

    /// Axis-aligned square of side 1 centred in the window.
    pub fn unit_square(&self) -> Result<Rect> {
        let (cx, cy) = self.window.center();
        let sq = Rect::new(cx - 0.5, cy - 0.5, cx + 0.5, cy + 0.5);
        let w = &self.window;
        let tol = GEOM_TOL * self.side_length;
        if sq.x0 < w.x0 - tol || sq.x1 > w.x1 + tol || sq.y0 < w.y0 - tol || sq.y1 > w.y1 + tol {
            return Err(Error::Geometry(
                "the unit square does not fit in the window".into(),
            ));
        }
        Ok(sq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_window_is_inset_quarter() {
        let g = GridSpec::new(1024, 2.0).unwrap();
        assert_eq!(g.spacing(), 1.0 / 512.0);
        assert_eq!(g.window, Rect::new(0.5, 0.5, 1.5, 1.5));
        let wi = g.window_index();
        assert_eq!((wi.ix0, wi.iy0, wi.width, wi.height), (256, 256, 513, 513));
        assert_eq!(g.unit_square().unwrap(), g.window);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(100, 2.0).is_err());
        assert!(GridSpec::new(4, 2.0).is_err());
        assert!(GridSpec::new(64, 0.0).is_err());
        assert!(GridSpec::with_window(64, 2.0, Rect::new(0.2, 0.5, 1.5, 1.5)).is_err());
        assert!(GridSpec::with_window(64, 2.0, Rect::new(0.6, 0.6, 1.2, 1.4)).is_ok());
    }

    #[test]
    fn local_global_roundtrip() {
        let g = GridSpec::new(64, 2.0).unwrap();
        let wi = g.window_index();
        for local in [0, 5, wi.len() - 1] {
            assert_eq!(wi.local(wi.global(local)), Some(local));
        }
        assert_eq!(wi.local(Vertex::new(0, 0)), None);
    }
}
