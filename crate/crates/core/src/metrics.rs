//! Evaluation metrics: scale-compensated channel NMSE, CFO squared error and
//! the one-bit achievable-rate lower bound.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::linalg::{leading_singular_triple, PowerIteration};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub nmse_linear: f64,
    pub nmse_db: f64,
    pub cfo_sq_err: f64,
    pub rate_bits: f64,
    pub gamma: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nmse {
    /// `‖H − γĤ‖_F / ‖H‖_F` (a norm ratio, not squared).
    pub linear: f64,
    /// `20 log10(linear)`.
    pub db: f64,
    /// Least-squares scale `argmin_a ‖H − aĤ‖_F`.
    pub gamma: Complex64,
}

fn check_shapes(h: &ChannelMatrix, h_hat: &ChannelMatrix) -> Result<()> {
    if h.0.dim() != h_hat.0.dim() {
        return Err(Error::DimensionMismatch {
            what: "estimate entries",
            expected: h.0.len(),
            actual: h_hat.0.len(),
        });
    }
    Ok(())
}

pub fn channel_nmse(h: &ChannelMatrix, h_hat: &ChannelMatrix) -> Result<Nmse> {
    check_shapes(h, h_hat)?;
    let h_norm = h.frobenius_norm();
    if h_norm == 0.0 {
        return Err(Error::Degenerate("true channel is zero"));
    }
    let est_energy: f64 = h_hat.0.iter().map(|z| z.norm_sqr()).sum();
    let gamma = if est_energy > 0.0 {
        h_hat
            .0
            .iter()
            .zip(h.0.iter())
            .map(|(e, t)| e.conj() * t)
            .sum::<Complex64>()
            / est_energy
    } else {
        Complex64::new(0.0, 0.0)
    };
    let err = h
        .0
        .iter()
        .zip(h_hat.0.iter())
        .map(|(t, e)| (t - gamma * e).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let linear = err / h_norm;
    Ok(Nmse {
        linear,
        db: 20.0 * linear.log10(),
        gamma,
    })
}

/// Squared minimal circular distance between two angles.
pub fn cfo_squared_error(omega_true: f64, omega_hat: f64) -> f64 {
    let d = (omega_true - omega_hat).rem_euclid(2.0 * PI);
    let d = d.min(2.0 * PI - d);
    d * d
}

/// Achievable-rate lower bound for one-bit receivers under the additive
/// quantization noise model.
///
/// The transmitter beamforms along the dominant right singular vector `f` of
/// `Ĥ` with total power `P = 10^{snr/10}` (unit thermal noise). With `g = H f`
/// and `α = 2/π`, each antenna sees signal `α P |g_k|²` against thermal noise
/// `α` plus distortion `(1 − α)(P |g_k|² + 1)`; the distortion is taken as
/// uncorrelated across antennas, so
/// `R = log2(1 + Σ_k α P |g_k|² / (α + (1 − α)(P |g_k|² + 1)))`.
/// Training overhead is ignored. An all-zero estimate yields zero rate.
pub fn rate_lower_bound(h: &ChannelMatrix, h_hat: &ChannelMatrix, snr_db: f64) -> Result<f64> {
    check_shapes(h, h_hat)?;
    if !snr_db.is_finite() {
        return Err(Error::NonFinite("snr_db"));
    }
    let lead = leading_singular_triple(h_hat.0.view(), PowerIteration::default());
    if lead.sigma == 0.0 {
        return Ok(0.0);
    }
    let power = 10f64.powf(snr_db / 10.0);
    let alpha = 2.0 / PI;
    let g = h.0.dot(&lead.v);
    let snr_eff: f64 = g
        .iter()
        .map(|gk| {
            let s = power * gk.norm_sqr();
            alpha * s / (alpha + (1.0 - alpha) * (s + 1.0))
        })
        .sum();
    Ok((1.0 + snr_eff).log2())
}
