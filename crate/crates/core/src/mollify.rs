//! Heat-kernel mollification `h*_eps = h * p_{eps^2/2}` as the Fourier
//! multiplier `exp(-eps^2 |omega|^2 / 4)`, `omega = 2 pi k / side_length`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fft::{self, Fft2};
use crate::field::{self, FieldSample, Normalization, MOLLIFIED_MAGIC};
use crate::grid::{GridSpec, Vertex};

#[derive(Debug, Clone, PartialEq)]
pub struct MollifiedField {
    pub spec: GridSpec,
    /// Seed of the field this was derived from.
    pub base_seed: u64,
    pub eps: f64,
    pub values: Vec<f64>,
}

impl MollifiedField {
    pub fn at(&self, v: Vertex) -> f64 {
        self.values[self.spec.index(v)]
    }

    /// Reinterprets the mollified values as a field, e.g. to mollify again.
    pub fn as_field(&self) -> FieldSample {
        FieldSample {
            spec: self.spec,
            seed: self.base_seed,
            values: self.values.clone(),
            normalization: Normalization::MeanZero,
        }
    }

    /// Same layout as the field dump with `eps` appended to the header (40 bytes).
    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_dump_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_dump_to(&self, mut w: impl Write) -> Result<()> {
        field::write_header(&mut w, MOLLIFIED_MAGIC, &self.spec, self.base_seed)?;
        w.write_all(&self.eps.to_le_bytes())?;
        field::write_values(&mut w, &self.values)
    }

    pub fn read_dump(path: &Path) -> Result<MollifiedField> {
        let mut r = BufReader::new(File::open(path)?);
        let (spec, base_seed) = field::read_header(&mut r, MOLLIFIED_MAGIC)?;
        let mut eps = [0u8; 8];
        r.read_exact(&mut eps)?;
        let values = field::read_values(&mut r, spec.len())?;
        Ok(MollifiedField {
            spec,
            base_seed,
            eps: f64::from_le_bytes(eps),
            values,
        })
    }
}

/// Admissible range `[2 spacing, side_length/8]`.
pub fn check_eps(spec: &GridSpec, eps: f64) -> Result<()> {
    let lo = 2.0 * spec.spacing();
    let hi = spec.side_length / 8.0;
    let tol = 1e-12 * spec.side_length;
    if eps.is_finite() && eps >= lo - tol && eps <= hi + tol {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "eps",
            value: eps,
            expected: "2*spacing <= eps <= side_length/8",
        })
    }
}

/// Mollifies at `eps`, checking the admissible range.
pub fn mollify(field: &FieldSample, eps: f64) -> Result<MollifiedField> {
    check_eps(&field.spec, eps)?;
    Ok(mollify_many(field, &[eps])?.pop().unwrap())
}

/// Mollifies at several scales, sharing one forward transform.
pub fn mollify_many(field: &FieldSample, eps: &[f64]) -> Result<Vec<MollifiedField>> {
    for &e in eps {
        check_eps(&field.spec, e)?;
    }
    Ok(mollify_unchecked(field, eps))
}

/// Applies the multiplier for any `eps >= 0` without range checks.
pub fn mollify_unchecked(field: &FieldSample, eps: &[f64]) -> Vec<MollifiedField> {
    let spec = field.spec;
    let n = spec.n;
    let plan = Fft2::new(n);
    let spectrum = fft::forward_real(&plan, &field.values);
    let omega_sq: Vec<f64> = (0..n * n)
        .map(|bin| field::angular_frequency_sq(bin % n, bin / n, &spec))
        .collect();
    eps.iter()
        .map(|&e| {
            let filtered = spectrum
                .iter()
                .zip(&omega_sq)
                .map(|(c, w2)| c * (-e * e * w2 / 4.0).exp())
                .collect();
            MollifiedField {
                spec,
                base_seed: field.seed,
                eps: e,
                values: fft::inverse_real(&plan, filtered),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_field;

    fn spec(n: usize) -> GridSpec {
        GridSpec::new(n, 2.0).unwrap()
    }

    #[test]
    fn constant_is_fixed() {
        let f = FieldSample::constant(spec(32), -1.25).unwrap();
        let m = mollify(&f, 0.2).unwrap();
        assert!(m.values.iter().all(|v| (v + 1.25).abs() < 1e-12));
    }

    #[test]
    fn eps_range() {
        let f = FieldSample::constant(spec(64), 0.0).unwrap();
        assert!(mollify(&f, 2.0 * 2.0 / 64.0).is_ok());
        assert!(mollify(&f, 0.25).is_ok());
        assert!(matches!(mollify(&f, 0.05), Err(Error::Domain { .. })));
        assert!(matches!(mollify(&f, 0.3), Err(Error::Domain { .. })));
    }

    #[test]
    fn mean_and_maximum_principle() {
        let f = sample_field(&spec(64), 4, Normalization::MeanZero).unwrap();
        let (lo, hi) = f
            .values
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        for eps in [0.07, 0.1, 0.2] {
            let m = mollify(&f, eps).unwrap();
            let mean = m.values.iter().sum::<f64>() / m.values.len() as f64;
            assert!((mean - f.mean()).abs() < 1e-12);
            assert!(m.values.iter().all(|&v| v >= lo - 1e-9 && v <= hi + 1e-9));
        }
    }

    #[test]
    fn dump_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        let f = sample_field(&spec(16), 2, Normalization::MeanZero).unwrap();
        let m = mollify(&f, 0.25).unwrap();
        m.write_dump(&path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 40 + 16 * 16 * 8);
        assert_eq!(MollifiedField::read_dump(&path).unwrap(), m);
    }
}
