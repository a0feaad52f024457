//! Output-side (measurement channel) denoisers.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use statrs::function::erf::erfc;

/// Measurement model `y = channel(z)`, `z = A x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutputChannel {
    /// `y = Q1(z + CN(0, noise_var))`, one-bit on real and imaginary parts.
    OneBit { noise_var: f64 },
    /// `y = z + CN(0, noise_var)`. Unquantized channel used to validate the
    /// solver against linear compressed-sensing baselines.
    Linear { noise_var: f64 },
}

impl OutputChannel {
    pub fn one_bit() -> Self {
        Self::OneBit { noise_var: 1.0 }
    }

    pub fn linear(noise_var: f64) -> Self {
        Self::Linear { noise_var }
    }

    pub fn noise_var(&self) -> f64 {
        match *self {
            Self::OneBit { noise_var } | Self::Linear { noise_var } => noise_var,
        }
    }

    /// Posterior mean and variance of `z` under the prior `CN(p_hat, tau_p)`.
    pub fn denoise(&self, p_hat: Complex64, tau_p: f64, y: Complex64) -> (Complex64, f64) {
        match *self {
            Self::OneBit { noise_var } => onebit_denoiser(p_hat, tau_p, y, noise_var),
            Self::Linear { noise_var } => {
                let gain = tau_p / (tau_p + noise_var);
                (p_hat + (y - p_hat) * gain, tau_p * noise_var / (tau_p + noise_var))
            }
        }
    }
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Inverse Mills ratio `ϕ(η) / Φ(η)`.
///
/// Below `η = −5` the normal CDF is replaced by the Laplace continued fraction
/// for the Mills ratio, so the result stays finite for any finite `η`.
pub fn inverse_mills_ratio(eta: f64) -> f64 {
    if eta > -5.0 {
        let cdf = 0.5 * erfc(-eta * FRAC_1_SQRT_2);
        std_normal_pdf(eta) / cdf
    } else {
        let x = -eta;
        // R(x) = 1/(x + 1/(x + 2/(x + 3/(x + …))))
        let mut tail = x;
        for k in (1..=120).rev() {
            tail = x + k as f64 / tail;
        }
        tail
    }
}

/// Posterior of a real scalar `z ~ N(p, v)` observed through
/// `y = sign(z + n)`, `n ~ N(0, noise_var)`, `y ∈ {−1, +1}`.
pub fn probit_posterior(p: f64, v: f64, noise_var: f64, y: f64) -> (f64, f64) {
    if v <= 0.0 {
        return (p, 0.0);
    }
    let s = (v + noise_var).sqrt();
    let eta = y * p / s;
    let ratio = inverse_mills_ratio(eta);
    let mean = p + y * v / s * ratio;
    let shrink = (ratio * (eta + ratio)).clamp(0.0, 1.0);
    let var = v * (1.0 - v / (v + noise_var) * shrink);
    (mean, var.max(0.0))
}

/// One-bit complex measurement: independent probit channels on the real and
/// imaginary parts with per-dimension prior variance `τ_p/2` and noise
/// variance `noise_var/2`.
pub fn onebit_denoiser(p_hat: Complex64, tau_p: f64, y: Complex64, noise_var: f64) -> (Complex64, f64) {
    let (mr, vr) = probit_posterior(p_hat.re, 0.5 * tau_p, 0.5 * noise_var, y.re.signum());
    let (mi, vi) = probit_posterior(p_hat.im, 0.5 * tau_p, 0.5 * noise_var, y.im.signum());
    (Complex64::new(mr, mi), vr + vi)
}

/// Posterior of `z` for a one-bit sample with unit-variance complex noise.
pub fn output_denoiser(p_hat: Complex64, tau_p: f64, y: Complex64) -> (Complex64, f64) {
    onebit_denoiser(p_hat, tau_p, y, 1.0)
}
