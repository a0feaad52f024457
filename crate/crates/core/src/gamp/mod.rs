//! EM-GAMP for sparse recovery through a generalized linear measurement channel.

mod output;
mod prior;
mod solver;

pub use output::{inverse_mills_ratio, onebit_denoiser, output_denoiser, probit_posterior, OutputChannel};
pub use prior::{em_update, input_denoiser, BernoulliGaussianPrior, MIN_SPARSITY};
pub use solver::{
    gamp_solve, gamp_solve_with_channel, initial_prior, GampConfig, GampDiagnostics, GampOutput,
    GampState, VarianceMode, INITIAL_SPARSITY,
};
