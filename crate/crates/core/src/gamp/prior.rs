//! Bernoulli-Gaussian input prior: the scalar MMSE denoiser and its EM update.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SPARSITY: f64 = 1e-6;

/// `X ~ λ CN(θ, φ) + (1 − λ) δ_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliGaussianPrior {
    pub lambda: f64,
    pub theta: Complex64,
    pub phi: f64,
}

impl BernoulliGaussianPrior {
    pub fn new(lambda: f64, theta: Complex64, phi: f64) -> Result<Self> {
        let p = Self { lambda, theta, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sparsity rate must lie in (0, 1], got {}",
                self.lambda
            )));
        }
        if !(self.phi > 0.0 && self.phi.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "active variance must be positive, got {}",
                self.phi
            )));
        }
        if !(self.theta.re.is_finite() && self.theta.im.is_finite()) {
            return Err(Error::NonFinite("prior mean"));
        }
        Ok(())
    }

    pub fn mean(&self) -> Complex64 {
        self.theta * self.lambda
    }

    pub fn variance(&self) -> f64 {
        self.lambda * (self.phi + self.theta.norm_sqr()) - self.mean().norm_sqr()
    }
}

/// Per-component posterior pieces shared by the denoiser and EM.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ActivePosterior {
    /// `P(active | r)`
    pub support: f64,
    /// Mean and variance of `X` given `r` and active.
    pub mean: Complex64,
    pub var: f64,
}

pub(crate) fn active_posterior(
    r_hat: Complex64,
    tau_r: f64,
    prior: &BernoulliGaussianPrior,
) -> ActivePosterior {
    let BernoulliGaussianPrior { lambda, theta, phi } = *prior;
    let tot = phi + tau_r;
    // log CN(r; 0, τ) − log CN(r; θ, φ + τ)
    let llr = tot.ln() - tau_r.ln() - r_hat.norm_sqr() / tau_r + (r_hat - theta).norm_sqr() / tot;
    let support = if lambda >= 1.0 {
        1.0
    } else {
        let logit = (1.0 - lambda).ln() - lambda.ln() + llr;
        // 1 / (1 + e^logit), evaluated without overflow
        if logit > 0.0 {
            let e = (-logit).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + logit.exp())
        }
    };
    ActivePosterior {
        support,
        mean: (r_hat * phi + theta * tau_r) / tot,
        var: phi * tau_r / tot,
    }
}

/// Posterior mean and variance of `X` given `R = X + CN(0, τ_r) = r_hat`.
pub fn input_denoiser(
    r_hat: Complex64,
    tau_r: f64,
    prior: &BernoulliGaussianPrior,
) -> (Complex64, f64) {
    let post = active_posterior(r_hat, tau_r, prior);
    let mean = post.mean * post.support;
    let second = post.support * (post.var + post.mean.norm_sqr());
    (mean, (second - mean.norm_sqr()).max(0.0))
}

/// One EM step for `(λ, θ, φ)` from the pseudo-measurements `r̂ = x + CN(0, τ_r)`.
pub fn em_update(
    r_hat: &[Complex64],
    tau_r: &[f64],
    prior: &BernoulliGaussianPrior,
) -> Result<BernoulliGaussianPrior> {
    if r_hat.len() != tau_r.len() {
        return Err(Error::DimensionMismatch {
            what: "tau_r",
            expected: r_hat.len(),
            actual: tau_r.len(),
        });
    }
    if r_hat.is_empty() {
        return Ok(*prior);
    }
    let posts: Vec<ActivePosterior> = r_hat
        .iter()
        .zip(tau_r)
        .map(|(r, t)| active_posterior(*r, *t, prior))
        .collect();
    let weight: f64 = posts.iter().map(|p| p.support).sum();
    let lambda = (weight / r_hat.len() as f64).clamp(MIN_SPARSITY, 1.0);
    if weight <= 0.0 || !weight.is_finite() {
        return Ok(BernoulliGaussianPrior { lambda, ..*prior });
    }
    let theta = posts.iter().map(|p| p.mean * p.support).sum::<Complex64>() / weight;
    let phi = posts
        .iter()
        .map(|p| p.support * ((p.mean - theta).norm_sqr() + p.var))
        .sum::<f64>()
        / weight;
    let phi = if phi > 0.0 && phi.is_finite() { phi } else { prior.phi };
    Ok(BernoulliGaussianPrior { lambda, theta, phi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pure_gaussian_case() {
        let p = BernoulliGaussianPrior::new(1.0, c(0.0, 0.0), 1.0).unwrap();
        let (m, v) = input_denoiser(c(2.0, 0.0), 1.0, &p);
        assert!((m - c(1.0, 0.0)).norm() < 1e-15);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn vanishing_sparsity_rate_kills_the_mean() {
        let p = BernoulliGaussianPrior::new(1e-300, c(0.0, 0.0), 1.0).unwrap();
        let (m, _) = input_denoiser(c(2.0, -1.0), 0.5, &p);
        assert!(m.norm() < 1e-250);
    }

    #[test]
    fn frozen_mixture_value() {
        // 40-digit evaluation of the two-component posterior
        let p = BernoulliGaussianPrior::new(0.5, c(0.0, 0.0), 1.0).unwrap();
        let (m, v) = input_denoiser(c(1.0, 0.0), 0.25, &p);
        assert!((m.re - 0.664_556_136_121_668_3).abs() < 1e-12);
        assert!(m.im.abs() < 1e-15);
        assert!((v - 0.256_149_084_870_790_4).abs() < 1e-12);
    }

    #[test]
    fn extreme_inputs_stay_finite() {
        let p = BernoulliGaussianPrior::new(1e-6, c(3.0, -2.0), 1e-8).unwrap();
        for r in [c(1e6, -1e6), c(0.0, 0.0), c(1e-9, 0.0)] {
            for tau in [1e-12, 1.0, 1e9] {
                let (m, v) = input_denoiser(r, tau, &p);
                assert!(m.re.is_finite() && m.im.is_finite() && v.is_finite() && v >= 0.0);
            }
        }
    }

    #[test]
    fn em_full_support_gives_unit_rate() {
        let p = BernoulliGaussianPrior::new(1.0, c(0.0, 0.0), 1.0).unwrap();
        let r = vec![c(0.1, 0.2), c(-3.0, 1.0), c(0.0, 0.0)];
        let next = em_update(&r, &[0.5; 3], &p).unwrap();
        assert_eq!(next.lambda, 1.0);
    }

    #[test]
    fn em_clamps_rate() {
        let p = BernoulliGaussianPrior::new(1e-6, c(0.0, 0.0), 1e-6).unwrap();
        let r = vec![c(0.0, 0.0); 50];
        let next = em_update(&r, &[1.0; 50], &p).unwrap();
        assert!(next.lambda >= MIN_SPARSITY);
        next.validate().unwrap();
    }

    #[test]
    fn invalid_priors_rejected() {
        assert!(BernoulliGaussianPrior::new(0.0, c(0.0, 0.0), 1.0).is_err());
        assert!(BernoulliGaussianPrior::new(1.5, c(0.0, 0.0), 1.0).is_err());
        assert!(BernoulliGaussianPrior::new(0.5, c(0.0, 0.0), 0.0).is_err());
    }
}
