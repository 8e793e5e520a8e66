//! Square 2-D FFTs on row-major buffers, built from 1-D `rustfft` plans.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// In-place unnormalised forward transform.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// In-place unnormalised inverse transform (`sum_k a_k e^{+2 pi i k.x/n}`).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n, "buffer is not n x n");
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Signed frequency index of FFT bin `k` (`k` for `k <= n/2`, else `k - n`).
pub fn signed_freq(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Real buffer -> complex spectrum.
pub fn forward_real(fft: &Fft2, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.forward(&mut buf);
    buf
}

/// Spectrum -> real part of the normalised inverse transform.
pub fn inverse_real(fft: &Fft2, mut spectrum: Vec<Complex64>) -> Vec<f64> {
    fft.inverse(&mut spectrum);
    let scale = 1.0 / (fft.n() * fft.n()) as f64;
    spectrum.into_iter().map(|c| c.re * scale).collect()
}
