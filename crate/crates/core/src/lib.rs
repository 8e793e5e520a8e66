//! Liouville first passage percolation on a lattice torus.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] holds the coupling constants `(gamma, d, xi, Q)`.
//! * [`grid`] describes the torus discretisation and the measurement window.
//! * [`field`] synthesises a log-correlated Gaussian field spectrally.
//! * [`mollify`] applies the heat-kernel mollifier as a Fourier multiplier.
//! * [`metric`] builds the exponentiated-field lattice metric and runs Dijkstra.
//! * [`balls`], [`confluence`] and [`measure`] derive geometric and area statistics.
//! * [`experiments`] aggregates replicas into the reports written by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balls;
pub mod confluence;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod field;
pub mod grid;
pub mod measure;
pub mod metric;
pub mod mollify;
pub mod params;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
pub use field::{FieldSample, Normalization};
pub use grid::{GridSpec, Rect, Vertex};
pub use metric::{DistanceField, Geodesic, MetricGraph, Stencil};
pub use mollify::MollifiedField;
pub use params::Parameters;
