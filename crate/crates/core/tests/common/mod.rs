#![allow(dead_code)]

use ndarray::Array2;
use onebit_cfo::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use onebit_cfo::gamp::BernoulliGaussianPrior;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::erf::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub fn cn(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn cn_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| cn(rng)).collect()
}

pub fn cn_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<Complex64> {
    Array2::from_shape_simple_fn((rows, cols), || cn(rng))
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|⟨a, b⟩| / (‖a‖ ‖b‖)`
pub fn correlation(a: &[Complex64], b: &[Complex64]) -> f64 {
    dot(a, b).norm() / (norm(a) * norm(b))
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `log ∫ exp(f(x)) dx` and the first two posterior moments, by the
/// trapezoidal rule on `[lo, hi]` with step `h`. Exponentially accurate for
/// smooth, rapidly decaying integrands when the window covers the mass.
pub fn log_moments(f: impl Fn(f64) -> f64, lo: f64, hi: f64, h: f64) -> (f64, f64, f64) {
    let n = ((hi - lo) / h).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
    let ls: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let top = ls.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (i, (&x, &l)) in xs.iter().zip(&ls).enumerate() {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 } * (l - top).exp();
        z += w;
        m1 += w * x;
        m2 += w * x * x;
    }
    let mean = m1 / z;
    (top + (z * h).ln(), mean, (m2 / z - mean * mean).max(0.0))
}

pub fn log_normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (2.0 * PI * var).ln() - (x - mean).powi(2) / (2.0 * var)
}

pub const GRID: usize = 50;

pub fn grid_p(i: usize) -> f64 {
    -5.0 + 10.0 * i as f64 / (GRID - 1) as f64
}

/// log-spaced over `[1e-3, 10]`
pub fn grid_tau(j: usize) -> f64 {
    10f64.powf(-3.0 + 4.0 * j as f64 / (GRID - 1) as f64)
}

/// Posterior of the active component along one real dimension:
/// prior `N(theta, phi/2)`, observation `r = x + N(0, tau/2)`.
pub fn active_dim(r: f64, tau: f64, theta: f64, phi: f64) -> (f64, f64, f64) {
    let (s_lik, s_pri) = ((0.5 * tau).sqrt(), (0.5 * phi).sqrt());
    let wide = s_lik.max(s_pri);
    let lo = r.min(theta) - 14.0 * wide;
    let hi = r.max(theta) + 14.0 * wide;
    log_moments(
        |x| log_normal_pdf(x, theta, 0.5 * phi) + log_normal_pdf(r, x, 0.5 * tau),
        lo,
        hi,
        s_lik.min(s_pri) / 8.0,
    )
}

/// Bernoulli-Gaussian posterior by explicit Bayes rule with the active
/// evidence obtained by quadrature.
pub fn input_oracle(r: Complex64, tau: f64, prior: &BernoulliGaussianPrior) -> (Complex64, f64) {
    let (zr, mr, vr) = active_dim(r.re, tau, prior.theta.re, prior.phi);
    let (zi, mi, vi) = active_dim(r.im, tau, prior.theta.im, prior.phi);
    let log_active = prior.lambda.ln() + zr + zi;
    let log_null = (1.0 - prior.lambda).ln() + log_normal_pdf(r.re, 0.0, 0.5 * tau) + log_normal_pdf(r.im, 0.0, 0.5 * tau);
    let pi = 1.0 / (1.0 + (log_null - log_active).exp());
    let mean = Complex64::new(mr, mi) * pi;
    let second = pi * (vr + mr * mr + vi + mi * mi);
    (mean, second - mean.norm_sqr())
}

pub fn log_std_normal_cdf(x: f64) -> f64 {
    if x > -30.0 {
        (0.5 * erfc(-x * FRAC_1_SQRT_2)).ln()
    } else {
        // leading terms of the asymptotic series
        let x2 = x * x;
        -0.5 * x2 - (-x).ln() - 0.5 * (2.0 * PI).ln() + (1.0 - 1.0 / x2 + 3.0 / (x2 * x2)).ln()
    }
}

/// One real probit dimension: `z ~ N(p, v)`, `y = sign(z + N(0, 1/2))`.
pub fn probit_dim(p: f64, v: f64, y: f64) -> (f64, f64) {
    let s = v.sqrt();
    let (_, m, var) = log_moments(
        |z| log_normal_pdf(z, p, v) + log_std_normal_cdf(y * z / FRAC_1_SQRT_2),
        p - 14.0 * s,
        p + 14.0 * s,
        s.min(FRAC_1_SQRT_2) / 8.0,
    );
    (m, var)
}

pub fn output_oracle(p: Complex64, tau: f64, y: Complex64) -> (Complex64, f64) {
    let (mr, vr) = probit_dim(p.re, 0.5 * tau, y.re);
    let (mi, vi) = probit_dim(p.im, 0.5 * tau, y.im);
    (Complex64::new(mr, mi), vr + vi)
}

