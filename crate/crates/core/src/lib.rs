//! Joint carrier-frequency-offset and sparse mmWave MIMO channel estimation
//! from one-bit quantized measurements.
//!
//! The bilinear CFO/channel model is lifted to a linear one in `vec(b c^T)`,
//! solved with EM-GAMP through a one-bit output channel, and split back into
//! factors with a rank-one SVD.

pub mod channel;
pub mod dft;
pub mod error;
pub mod experiment;
pub mod frontend;
pub mod gamp;
pub mod lifting;
pub mod linalg;
pub mod metrics;
pub mod operator;
pub mod pipeline;
pub mod recovery;

pub use error::{Error, Result};
pub use num_complex::Complex64;
