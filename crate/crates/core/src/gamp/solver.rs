//! Sum-product GAMP with an EM-learned Bernoulli-Gaussian prior.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::output::OutputChannel;
use super::prior::{em_update, input_denoiser, BernoulliGaussianPrior};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;

/// How `τ_p` and `τ_r` are propagated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VarianceMode {
    /// One variance per side, using the mean row/column power of `A`.
    Scalar,
    /// Per-component variances through `|A|²`. The lifted operator has
    /// uniform row powers, but `τ_p` still varies strongly across rows once
    /// the posterior variance concentrates on a few coefficients.
    #[default]
    Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GampConfig {
    pub max_iters: usize,
    /// Stop once `‖x̂ᵗ − x̂ᵗ⁻¹‖ / ‖x̂ᵗ⁻¹‖` drops below this.
    pub tol: f64,
    /// Weight on the new iterate; 1 disables damping.
    pub damping: f64,
    pub variance_floor: f64,
    pub em_enabled: bool,
    pub em_start_iter: usize,
    pub variance_mode: VarianceMode,
}

impl Default for GampConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            tol: 1e-6,
            damping: 0.7,
            variance_floor: 1e-12,
            em_enabled: true,
            em_start_iter: 1,
            variance_mode: VarianceMode::Vector,
        }
    }
}

impl GampConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig("damping must lie in (0, 1]".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if !(self.variance_floor > 0.0) {
            return Err(Error::InvalidConfig("variance_floor must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Iteration state. Variances follow the complex convention `E|·|²`.
#[derive(Debug, Clone)]
pub struct GampState {
    pub x_hat: Vec<Complex64>,
    pub tau_x: Vec<f64>,
    pub s_hat: Vec<Complex64>,
    pub tau_s: Vec<f64>,
    pub p_hat: Vec<Complex64>,
    pub tau_p: Vec<f64>,
    pub r_hat: Vec<Complex64>,
    pub tau_r: Vec<f64>,
    pub iter: usize,
    pub residual_history: Vec<f64>,
}

/// Flat summary of a solve, suitable for logging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GampDiagnostics {
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub lambda: f64,
    pub theta_re: f64,
    pub theta_im: f64,
    pub phi: f64,
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GampOutput {
    pub state: GampState,
    pub prior: BernoulliGaussianPrior,
    pub diagnostics: GampDiagnostics,
}

impl GampOutput {
    pub fn x_hat(&self) -> &[Complex64] {
        &self.state.x_hat
    }

    pub fn tau_x(&self) -> &[f64] {
        &self.state.tau_x
    }
}

pub const INITIAL_SPARSITY: f64 = 0.1;

/// Starting prior: `λ₀ = 0.1`, `θ₀ = 0` and `φ₀` matched to the measured
/// energy per sample, `E|z_i|² ≈ (‖A‖_F²/m) λ₀ φ₀`.
pub fn initial_prior<O: LinearOperator + ?Sized>(
    op: &O,
    y: &[Complex64],
    channel: &OutputChannel,
) -> BernoulliGaussianPrior {
    let m = op.rows().max(1) as f64;
    let energy = y.iter().map(|z| z.norm_sqr()).sum::<f64>() / m;
    let noise = channel.noise_var();
    let signal = (energy - noise).max(0.1 * noise.max(f64::MIN_POSITIVE));
    let row_power = op.frobenius_sq() / m;
    let phi = if row_power > 0.0 {
        signal / (INITIAL_SPARSITY * row_power)
    } else {
        1.0
    };
    BernoulliGaussianPrior {
        lambda: INITIAL_SPARSITY,
        theta: Complex64::new(0.0, 0.0),
        phi,
    }
}

fn validate_onebit(y: &[Complex64]) -> Result<()> {
    for (i, z) in y.iter().enumerate() {
        if z.re.abs() != 1.0 || z.im.abs() != 1.0 {
            return Err(Error::InvalidOneBit(i));
        }
    }
    Ok(())
}

/// Recover `x` from one-bit measurements `y = Q1(A x + CN(0, 1))`.
pub fn gamp_solve<O: LinearOperator + ?Sized>(
    op: &O,
    y: &[Complex64],
    prior0: &BernoulliGaussianPrior,
    cfg: &GampConfig,
) -> Result<GampOutput> {
    gamp_solve_with_channel(op, y, &OutputChannel::one_bit(), prior0, cfg)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

pub fn gamp_solve_with_channel<O: LinearOperator + ?Sized>(
    op: &O,
    y: &[Complex64],
    channel: &OutputChannel,
    prior0: &BernoulliGaussianPrior,
    cfg: &GampConfig,
) -> Result<GampOutput> {
    cfg.validate()?;
    prior0.validate()?;
    let (m, d) = (op.rows(), op.cols());
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            what: "measurements",
            expected: m,
            actual: y.len(),
        });
    }
    if let OutputChannel::OneBit { .. } = channel {
        validate_onebit(y)?;
    } else if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("measurements"));
    }

    let floor = cfg.variance_floor;
    let beta = cfg.damping;
    let row_power = op.frobenius_sq() / m.max(1) as f64;
    let col_power = op.frobenius_sq() / d.max(1) as f64;

    let mut prior = *prior0;
    let mut state = GampState {
        x_hat: vec![prior.mean(); d],
        tau_x: vec![prior.variance().max(floor); d],
        s_hat: vec![Complex64::new(0.0, 0.0); m],
        tau_s: vec![0.0; m],
        p_hat: vec![Complex64::new(0.0, 0.0); m],
        tau_p: vec![0.0; m],
        r_hat: vec![Complex64::new(0.0, 0.0); d],
        tau_r: vec![0.0; d],
        iter: 0,
        residual_history: Vec::with_capacity(cfg.max_iters),
    };
    let initial_scale = {
        let s = (d as f64 * (prior.variance() + prior.mean().norm_sqr())).sqrt();
        if s > 0.0 && s.is_finite() {
            s
        } else {
            1.0
        }
    };

    let diagnostics = |state: &GampState, prior: &BernoulliGaussianPrior, converged: bool| {
        GampDiagnostics {
            iterations: state.iter,
            final_residual: state.residual_history.last().copied().unwrap_or(f64::NAN),
            converged,
            lambda: prior.lambda,
            theta_re: prior.theta.re,
            theta_im: prior.theta.im,
            phi: prior.phi,
            residual_history: state.residual_history.clone(),
        }
    };

    let mut converged = false;
    for it in 1..=cfg.max_iters {
        state.iter = it;
        let damp = it > 1;

        // output linear step
        state.tau_p = match cfg.variance_mode {
            VarianceMode::Scalar => vec![(row_power * mean(&state.tau_x)).max(floor); m],
            VarianceMode::Vector => op
                .forward_abs_sq(&state.tau_x)
                .into_iter()
                .map(|v| v.max(floor))
                .collect(),
        };
        let ax = op.forward(&state.x_hat);
        for i in 0..m {
            state.p_hat[i] = ax[i] - state.s_hat[i] * state.tau_p[i];
        }

        // output nonlinear step
        for i in 0..m {
            let tp = state.tau_p[i];
            let (z_mean, z_var) = channel.denoise(state.p_hat[i], tp, y[i]);
            let s_new = (z_mean - state.p_hat[i]) / tp;
            let ts_new = ((1.0 - z_var / tp) / tp).max(floor);
            state.s_hat[i] = if damp {
                s_new * beta + state.s_hat[i] * (1.0 - beta)
            } else {
                s_new
            };
            state.tau_s[i] = ts_new;
        }

        // input linear step
        state.tau_r = match cfg.variance_mode {
            VarianceMode::Scalar => vec![1.0 / (col_power * mean(&state.tau_s)).max(floor); d],
            VarianceMode::Vector => op
                .adjoint_abs_sq(&state.tau_s)
                .into_iter()
                .map(|v| 1.0 / v.max(floor))
                .collect(),
        };
        let ats = op.adjoint(&state.s_hat);
        for j in 0..d {
            state.r_hat[j] = state.x_hat[j] + ats[j] * state.tau_r[j];
        }

        // input nonlinear step
        let mut diff_sq = 0.0;
        let prev_norm = norm(&state.x_hat);
        for j in 0..d {
            let (x_new, tx_new) = input_denoiser(state.r_hat[j], state.tau_r[j], &prior);
            let x_prev = state.x_hat[j];
            // τ_x is damped along with x̂ so the variance tracks the lagging
            // mean; otherwise τ_r collapses first and EM sees spurious support
            let (x, tx) = if damp {
                (
                    x_new * beta + x_prev * (1.0 - beta),
                    beta * tx_new + (1.0 - beta) * state.tau_x[j],
                )
            } else {
                (x_new, tx_new)
            };
            diff_sq += (x - x_prev).norm_sqr();
            state.x_hat[j] = x;
            state.tau_x[j] = tx.max(floor);
        }

        if cfg.em_enabled && it >= cfg.em_start_iter {
            prior = em_update(&state.r_hat, &state.tau_r, &prior)?;
        }

        let residual = if prev_norm > 0.0 {
            diff_sq.sqrt() / prev_norm
        } else if diff_sq > 0.0 {
            1.0
        } else {
            0.0
        };
        state.residual_history.push(residual);

        let x_norm = norm(&state.x_hat);
        let finite = x_norm.is_finite()
            && residual.is_finite()
            && state.tau_x.iter().all(|v| v.is_finite())
            && state.s_hat.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite || x_norm > 1e6 * initial_scale {
            return Err(Error::Diverged(Box::new(diagnostics(&state, &prior, false))));
        }
        if residual < cfg.tol {
            converged = true;
            break;
        }
    }

    let diagnostics = diagnostics(&state, &prior, converged);
    Ok(GampOutput {
        state,
        prior,
        diagnostics,
    })
}
