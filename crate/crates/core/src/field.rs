//! Spectral synthesis of a log-correlated Gaussian field on the torus.
//!
//! Mode `k != 0` receives an independent complex Gaussian with variance
//! `S(k) = 2 pi / (n^2 lambda(k))`, where `lambda(k) = 4 - 2cos(2 pi k1/n) - 2cos(2 pi k2/n)`
//! is the symbol of the negated five-point Laplacian. The factor `2 pi` turns
//! the lattice Green's function into `-log|z - w| + O(1)`.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{self, Fft2};
use crate::grid::{GridSpec, Vertex};
use crate::seed::keyed_normal_pair;

/// Prefactor turning the lattice Green's function into `-log` covariance.
pub const COVARIANCE_SCALE: f64 = 2.0 * PI;

pub(crate) const FIELD_MAGIC: &[u8; 8] = b"LFPPFLD1";
pub(crate) const MOLLIFIED_MAGIC: &[u8; 8] = b"LFPPMOL1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    MeanZero,
    /// Shift so the (periodic) circle average at `center`, `radius` is zero.
    CircleAverageZero {
        center: (f64, f64),
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub spec: GridSpec,
    pub seed: u64,
    /// Row-major `values[iy * n + ix]`.
    pub values: Vec<f64>,
    pub normalization: Normalization,
}

impl FieldSample {
    /// Wraps deterministic values (tests and constructed instances).
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(Error::Invalid(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("field values must be finite".into()));
        }
        Ok(FieldSample {
            spec,
            seed: 0,
            values,
            normalization: Normalization::MeanZero,
        })
    }

    pub fn constant(spec: GridSpec, c: f64) -> Result<Self> {
        Self::from_values(spec, vec![c; spec.len()])
    }

    pub fn at(&self, v: Vertex) -> f64 {
        self.values[self.spec.index(v)]
    }

    /// Pointwise `h + f`.
    pub fn shifted_by(&self, f: impl Fn(Vertex) -> f64) -> FieldSample {
        let n = self.spec.n;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &h)| h + f(Vertex::new(i % n, i / n)))
            .collect();
        FieldSample {
            values,
            ..self.clone()
        }
    }

    /// Cyclic shift: the result at `v` is the input at `v + (dx, dy)`.
    pub fn translated(&self, dx: usize, dy: usize) -> FieldSample {
        let n = self.spec.n;
        let mut values = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..n {
                values[iy * n + ix] = self.values[((iy + dy) % n) * n + (ix + dx) % n];
            }
        }
        FieldSample {
            values,
            ..self.clone()
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Bilinear interpolation with periodic wrap.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        bilinear_periodic(&self.values, self.spec.n, self.spec.spacing(), x, y)
    }

    /// Circle average over equispaced points; the circle must lie in the window.
    pub fn circle_average(&self, center: (f64, f64), radius: f64) -> Result<f64> {
        circle_average(self, center, radius)
    }

    /// Writes the binary dump: 32-byte header `magic[8] | n u64 | side f64 | seed u64`
    /// (little endian), then `n*n` little-endian doubles, row-major.
    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_dump_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_dump_to(&self, mut w: impl Write) -> Result<()> {
        write_header(&mut w, FIELD_MAGIC, &self.spec, self.seed)?;
        write_values(&mut w, &self.values)
    }

    /// Reads a dump written by [`FieldSample::write_dump`]. The default window
    /// and mean-zero tag are assumed, as neither is stored.
    pub fn read_dump(path: &Path) -> Result<FieldSample> {
        let mut r = BufReader::new(File::open(path)?);
        let (spec, seed) = read_header(&mut r, FIELD_MAGIC)?;
        let values = read_values(&mut r, spec.len())?;
        Ok(FieldSample {
            spec,
            seed,
            values,
            normalization: Normalization::MeanZero,
        })
    }
}

pub(crate) fn write_header(
    w: &mut impl Write,
    magic: &[u8; 8],
    spec: &GridSpec,
    seed: u64,
) -> Result<()> {
    w.write_all(magic)?;
    w.write_all(&(spec.n as u64).to_le_bytes())?;
    w.write_all(&spec.side_length.to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    Ok(())
}

pub(crate) fn read_header(r: &mut impl Read, magic: &[u8; 8]) -> Result<(GridSpec, u64)> {
    let mut buf = [0u8; 32];
    r.read_exact(&mut buf)?;
    if &buf[..8] != magic {
        return Err(Error::Io("bad dump magic".into()));
    }
    let n = u64::from_le_bytes(buf[8..16].try_into().unwrap()) as usize;
    let side = f64::from_le_bytes(buf[16..24].try_into().unwrap());
    let seed = u64::from_le_bytes(buf[24..32].try_into().unwrap());
    let spec = GridSpec::new(n, side).map_err(|e| Error::Io(format!("bad dump header: {e}")))?;
    Ok((spec, seed))
}

pub(crate) fn write_values(w: &mut impl Write, values: &[f64]) -> Result<()> {
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_values(r: &mut impl Read, len: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; len * 8];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// `4 - 2cos(2 pi k1/n) - 2cos(2 pi k2/n)`.
pub fn lattice_symbol(k1: usize, k2: usize, n: usize) -> f64 {
    let t = 2.0 * PI / n as f64;
    4.0 - 2.0 * (t * k1 as f64).cos() - 2.0 * (t * k2 as f64).cos()
}

/// Per-bin mode variance `S(k)`, row-major over `(ky, kx)`; zero at `k = 0`.
pub fn spectral_density(n: usize) -> Vec<f64> {
    let norm = COVARIANCE_SCALE / (n * n) as f64;
    let mut s = vec![0.0; n * n];
    for ky in 0..n {
        for kx in 0..n {
            if kx == 0 && ky == 0 {
                continue;
            }
            s[ky * n + kx] = norm / lattice_symbol(kx, ky, n);
        }
    }
    s
}

/// Squared continuum angular frequency `|omega_k|^2` of bin `(kx, ky)`.
pub fn angular_frequency_sq(kx: usize, ky: usize, spec: &GridSpec) -> f64 {
    let t = 2.0 * PI / spec.side_length;
    let wx = t * fft::signed_freq(kx, spec.n) as f64;
    let wy = t * fft::signed_freq(ky, spec.n) as f64;
    wx * wx + wy * wy
}

fn signed_mode(bin: usize, n: usize) -> (i64, i64) {
    (fft::signed_freq(bin % n, n), fft::signed_freq(bin / n, n))
}

/// Stream key of a mode, independent of the grid size.
fn mode_key((kx, ky): (i64, i64)) -> u64 {
    ((kx as i32 as u32 as u64) << 32) | ky as i32 as u32 as u64
}

/// Draws a field sample. The result depends only on `(spec, seed, normalization)`.
pub fn sample_field(
    spec: &GridSpec,
    seed: u64,
    normalization: Normalization,
) -> Result<FieldSample> {
    spec.validate()?;
    let n = spec.n;
    let density = spectral_density(n);
    let mut spectrum: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|bin| {
            let conj = ((n - bin / n) % n) * n + (n - bin % n) % n;
            let s = density[bin];
            let here = signed_mode(bin, n);
            let there = signed_mode(conj, n);
            if bin == 0 {
                Complex64::default()
            } else if bin == conj {
                let (g, _) = keyed_normal_pair(seed, mode_key(here));
                Complex64::new(s.sqrt() * g, 0.0)
            } else {
                // A conjugate pair is keyed by its member with the larger
                // (ky, kx) signed frequency, so grids of different sizes share
                // the draws of their common modes.
                let canonical = (here.1, here.0) > (there.1, there.0);
                let key = mode_key(if canonical { here } else { there });
                let (a, b) = keyed_normal_pair(seed, key);
                let amp = (0.5 * s).sqrt();
                let z = Complex64::new(amp * a, amp * b);
                if canonical {
                    z
                } else {
                    z.conj()
                }
            }
        })
        .collect();
    Fft2::new(n).inverse(&mut spectrum);
    let mut values: Vec<f64> = spectrum.into_iter().map(|c| c.re).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter_mut().for_each(|v| *v -= mean);
    let mut field = FieldSample {
        spec: *spec,
        seed,
        values,
        normalization,
    };
    if let Normalization::CircleAverageZero { center, radius } = normalization {
        let avg = circle_average_periodic(&field, center, radius)?;
        field.values.iter_mut().for_each(|v| *v -= avg);
    }
    Ok(field)
}

/// Exact pointwise variance of the field mollified at `eps` (`eps = 0`: raw field),
/// `sum_{k != 0} S(k) exp(-eps^2 |omega_k|^2 / 2)`.
pub fn spectral_point_variance(spec: &GridSpec, eps: f64) -> f64 {
    let n = spec.n;
    let density = spectral_density(n);
    let mut total = 0.0;
    for ky in 0..n {
        for kx in 0..n {
            let s = density[ky * n + kx];
            if s == 0.0 {
                continue;
            }
            total += s * (-eps * eps * angular_frequency_sq(kx, ky, spec) / 2.0).exp();
        }
    }
    total
}

/// Exact covariance of raw field values at lattice offset `(dx, dy)`.
pub fn spectral_covariance(n: usize, dx: usize, dy: usize) -> f64 {
    let density = spectral_density(n);
    let t = 2.0 * PI / n as f64;
    let mut total = 0.0;
    for ky in 0..n {
        for kx in 0..n {
            total += density[ky * n + kx] * (t * (kx * dx + ky * dy) as f64).cos();
        }
    }
    total
}

/// Prefactor that would make the covariance drop by exactly `log 2` between
/// axis separations `r0` and `2 r0` lattice units, with `r0 = max(4, n/64)`.
/// Reported as a diagnostic next to [`COVARIANCE_SCALE`].
pub fn matched_calibration(n: usize) -> f64 {
    let r0 = (n / 64).max(4).min(n / 4);
    let g = |r: usize| spectral_covariance(n, r, 0) / COVARIANCE_SCALE;
    std::f64::consts::LN_2 / (g(r0) - g(2 * r0))
}

fn bilinear_periodic(values: &[f64], n: usize, h: f64, x: f64, y: f64) -> f64 {
    let gx = (x / h).rem_euclid(n as f64);
    let gy = (y / h).rem_euclid(n as f64);
    let ix = (gx.floor() as usize).min(n - 1);
    let iy = (gy.floor() as usize).min(n - 1);
    let fx = gx - ix as f64;
    let fy = gy - iy as f64;
    let jx = (ix + 1) % n;
    let jy = (iy + 1) % n;
    let v00 = values[iy * n + ix];
    let v10 = values[iy * n + jx];
    let v01 = values[jy * n + ix];
    let v11 = values[jy * n + jx];
    (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11)
}

/// Number of quadrature points used for a circle of the given radius.
pub fn circle_points(radius: f64, spacing: f64) -> usize {
    ((2.0 * PI * radius / spacing).ceil() as usize).max(64)
}

/// Circle average with periodic wrap and no window restriction.
pub fn circle_average_periodic(
    field: &FieldSample,
    center: (f64, f64),
    radius: f64,
) -> Result<f64> {
    let h = field.spec.spacing();
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Geometry(format!(
            "circle radius {radius} must be positive"
        )));
    }
    let m = circle_points(radius, h);
    let sum: f64 = (0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64;
            field.interpolate(center.0 + radius * t.cos(), center.1 + radius * t.sin())
        })
        .sum();
    Ok(sum / m as f64)
}

/// Mean of bilinearly interpolated values on `max(64, ceil(2 pi r / spacing))`
/// equispaced circle points.
pub fn circle_average(field: &FieldSample, center: (f64, f64), radius: f64) -> Result<f64> {
    let spec = &field.spec;
    if radius < 4.0 * spec.spacing() * (1.0 - 1e-12) {
        return Err(Error::Geometry(format!(
            "radius {radius} is below 4 grid spacings"
        )));
    }
    if !spec.disc_in_window(center, radius) {
        return Err(Error::Geometry(format!(
            "circle at {center:?} with radius {radius} exits the window"
        )));
    }
    circle_average_periodic(field, center, radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> GridSpec {
        GridSpec::new(n, 2.0).unwrap()
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let g = spec(32);
        let a = sample_field(&g, 11, Normalization::MeanZero).unwrap();
        let b = sample_field(&g, 11, Normalization::MeanZero).unwrap();
        let c = sample_field(&g, 12, Normalization::MeanZero).unwrap();
        let bits = |f: &FieldSample| f.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn mean_zero_normalization() {
        let g = spec(64);
        for seed in 0..5 {
            let f = sample_field(&g, seed, Normalization::MeanZero).unwrap();
            let sd = (f.values.iter().map(|v| v * v).sum::<f64>() / f.values.len() as f64).sqrt();
            assert!(f.mean().abs() <= 1e-10 * sd);
        }
    }

    #[test]
    fn circle_average_zero_normalization() {
        let g = spec(64);
        let norm = Normalization::CircleAverageZero {
            center: (1.0, 1.0),
            radius: 1.0,
        };
        let f = sample_field(&g, 3, norm).unwrap();
        assert!(circle_average_periodic(&f, (1.0, 1.0), 1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn circle_average_of_constant_and_linearity() {
        let g = spec(64);
        let c = FieldSample::constant(g, 2.5).unwrap();
        assert!((circle_average(&c, (1.0, 1.0), 0.3).unwrap() - 2.5).abs() < 1e-12);
        let f = sample_field(&g, 5, Normalization::MeanZero).unwrap();
        let shifted = f.shifted_by(|_| 0.7);
        let a = circle_average(&f, (1.0, 1.0), 0.3).unwrap();
        let b = circle_average(&shifted, (1.0, 1.0), 0.3).unwrap();
        assert!((b - a - 0.7).abs() < 1e-12);
    }

    #[test]
    fn circle_average_geometry_errors() {
        let f = FieldSample::constant(spec(64), 0.0).unwrap();
        assert!(matches!(
            circle_average(&f, (1.0, 1.0), 0.6),
            Err(Error::Geometry(_))
        ));
        assert!(matches!(
            circle_average(&f, (1.0, 1.0), 0.05),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn spectral_variance_decreases_to_zero() {
        let g = spec(64);
        let mut last = f64::INFINITY;
        for eps in [0.0, 0.01, 0.05, 0.1, 0.2, 0.5] {
            let v = spectral_point_variance(&g, eps);
            assert!(v < last);
            last = v;
        }
        assert!(spectral_point_variance(&g, 1e3) < 1e-300);
    }

    #[test]
    fn covariance_at_zero_lag_equals_point_variance() {
        let g = spec(32);
        let a = spectral_covariance(32, 0, 0);
        let b = spectral_point_variance(&g, 0.0);
        assert!((a - b).abs() < 1e-12 * b);
    }

    #[test]
    fn matched_calibration_near_two_pi() {
        let c = matched_calibration(512);
        assert!((c / COVARIANCE_SCALE - 1.0).abs() < 0.01, "{c}");
    }

    #[test]
    fn dump_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        let f = sample_field(&spec(16), 9, Normalization::MeanZero).unwrap();
        f.write_dump(&path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 32 + 16 * 16 * 8);
        let g = FieldSample::read_dump(&path).unwrap();
        assert_eq!(g.seed, 9);
        assert_eq!(g.values, f.values);
    }

    #[test]
    fn resolutions_share_low_modes() {
        let (coarse, fine) = (spec(64), spec(128));
        let eps = 0.25;
        let a = crate::mollify::mollify(
            &sample_field(&coarse, 5, Normalization::MeanZero).unwrap(),
            eps,
        )
        .unwrap();
        let b = crate::mollify::mollify(
            &sample_field(&fine, 5, Normalization::MeanZero).unwrap(),
            eps,
        )
        .unwrap();
        let sd = (a.values.iter().map(|v| v * v).sum::<f64>() / a.values.len() as f64).sqrt();
        let mut worst: f64 = 0.0;
        for iy in 0..64 {
            for ix in 0..64 {
                let d = a.values[iy * 64 + ix] - b.values[2 * iy * 128 + 2 * ix];
                worst = worst.max(d.abs());
            }
        }
        assert!(worst < 0.02 * sd, "{worst} vs sd {sd}");
        let c = crate::mollify::mollify(
            &sample_field(&fine, 6, Normalization::MeanZero).unwrap(),
            eps,
        )
        .unwrap();
        assert!((0..64).any(|i| (a.values[i] - c.values[2 * i]).abs() > 0.1 * sd));
    }
}
