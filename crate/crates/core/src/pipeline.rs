//! End-to-end estimation from a one-bit received block.

use crate::error::{Error, Result};
use crate::frontend::{QuantizedBlock, TrainingBlock};
use crate::gamp::{gamp_solve, initial_prior, GampConfig, GampDiagnostics, OutputChannel};
use crate::lifting::build_operator;
use crate::recovery::{recover, JointEstimate};

#[derive(Debug, Clone)]
pub struct EstimationOutput {
    pub estimate: JointEstimate,
    pub diagnostics: GampDiagnostics,
}

/// Lift, solve with EM-GAMP and split the result into CFO and channel.
pub fn estimate_joint(
    y: &QuantizedBlock,
    training: &TrainingBlock,
    gamp: &GampConfig,
) -> Result<EstimationOutput> {
    let (n_rx, n_p) = y.0.dim();
    if n_p != training.n_p() {
        return Err(Error::DimensionMismatch {
            what: "received block columns vs pilot length",
            expected: training.n_p(),
            actual: n_p,
        });
    }
    let op = build_operator(training, n_rx)?;
    let y_vec = y.to_measurement_vector();
    let prior0 = initial_prior(&op, &y_vec, &OutputChannel::one_bit());
    let out = gamp_solve(&op, &y_vec, &prior0, gamp)?;
    let estimate = recover(out.x_hat(), n_rx, training.n_tx(), n_p)?;
    Ok(EstimationOutput {
        estimate,
        diagnostics: out.diagnostics,
    })
}
