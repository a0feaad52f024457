//! DFT matrices and FFT helpers.
//!
//! `U_N(k, l) = exp(-j 2π k l / N)` (0-based, unnormalized). Forward transforms
//! multiply by `U_N`; the unnormalized inverse multiplies by `U_N^*`.

use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub fn dft_matrix(n: usize) -> Array2<Complex64> {
    let step = -2.0 * std::f64::consts::PI / n as f64;
    Array2::from_shape_fn((n, n), |(k, l)| {
        // reduce the exponent modulo n before scaling to keep the phase exact for large k*l
        let kl = (k * l) % n;
        Complex64::from_polar(1.0, step * kl as f64)
    })
}

/// Planned forward/inverse transforms of one length.
#[derive(Clone)]
pub struct Dft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Dft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dft").field("n", &self.n).finish()
    }
}

impl Dft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In place `U_N v` on every contiguous length-`n` chunk of `buf`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        if !buf.is_empty() {
            self.forward.process(buf);
        }
    }

    /// In place `U_N^* v` (no 1/N) on every contiguous length-`n` chunk of `buf`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        if !buf.is_empty() {
            self.inverse.process(buf);
        }
    }
}
