//! Rank-one split of the lifted estimate into CFO and channel factors, channel
//! reconstruction, and coarse/fine CFO estimation.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::dft::{dft_matrix, Dft};
use crate::error::{Error, Result};
use crate::frontend::wrap_to_2pi;
use crate::linalg::{leading_singular_triple, second_singular_value, PowerIteration};

#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Factors {
    /// `σ₁ u₁`
    pub b_hat: Array1<Complex64>,
    /// `conj(v₁)`
    pub c_hat: Array1<Complex64>,
    /// `σ₁ / σ₂`, infinite when `σ₂ = 0`.
    pub sigma1_ratio: f64,
}

/// Recovered CFO and channel. `b_hat` and `c_hat` share an unknown complex
/// scale; only scale-invariant functions of them are meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEstimate {
    pub b_hat: Array1<Complex64>,
    pub c_hat: Array1<Complex64>,
    pub h_hat: ChannelMatrix,
    pub omega_coarse: f64,
    pub omega_hat: f64,
    pub sigma1_ratio: f64,
}

fn check_finite(v: &[Complex64], what: &'static str) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn check_nonzero(v: &[Complex64], what: &'static str) -> Result<()> {
    if v.iter().any(|z| z.norm_sqr() > 0.0) {
        Ok(())
    } else {
        Err(Error::Degenerate(what))
    }
}

/// Leading singular triple of the column-major `n_p × n_cols` reshaping of `x_hat`.
pub fn rank1_decompose(x_hat: &[Complex64], n_p: usize, n_cols: usize) -> Result<Rank1Factors> {
    if x_hat.len() != n_p * n_cols {
        return Err(Error::DimensionMismatch {
            what: "lifted estimate",
            expected: n_p * n_cols,
            actual: x_hat.len(),
        });
    }
    check_finite(x_hat, "lifted estimate")?;
    check_nonzero(x_hat, "lifted estimate is all zero")?;

    let x = Array2::from_shape_fn((n_p, n_cols), |(n, j)| x_hat[j * n_p + n]);
    let opts = PowerIteration::default();
    let lead = leading_singular_triple(x.view(), opts);
    let sigma2 = second_singular_value(x.view(), &lead, opts);
    let sigma1_ratio = if sigma2 > 0.0 {
        lead.sigma / sigma2
    } else {
        f64::INFINITY
    };
    Ok(Rank1Factors {
        b_hat: lead.u.mapv(|z| z * lead.sigma),
        c_hat: lead.v.mapv(|z| z.conj()),
        sigma1_ratio,
    })
}

/// `Ĥ = U_Nrx Ĉ U_Ntx^*` with `vec(Ĉ^T) = ĉ`.
pub fn reconstruct_channel(c_hat: &[Complex64], n_rx: usize, n_tx: usize) -> Result<ChannelMatrix> {
    if c_hat.len() != n_rx * n_tx {
        return Err(Error::DimensionMismatch {
            what: "channel vector",
            expected: n_rx * n_tx,
            actual: c_hat.len(),
        });
    }
    let c = Array2::from_shape_fn((n_rx, n_tx), |(k, t)| c_hat[k * n_tx + t]);
    let u_rx = dft_matrix(n_rx);
    let u_tx_h = dft_matrix(n_tx).t().mapv(|z| z.conj());
    Ok(ChannelMatrix(u_rx.dot(&c).dot(&u_tx_h)))
}

/// `vec(C^T)`: inverse of the unstacking in [`reconstruct_channel`].
pub fn stack_beamspace(c: &Array2<Complex64>) -> Array1<Complex64> {
    c.iter().copied().collect()
}

/// Index of the largest magnitude; ties go to the smaller index.
fn peak_index(v: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_mag = v[0].norm_sqr();
    for (i, z) in v.iter().enumerate().skip(1) {
        let mag = z.norm_sqr();
        if mag > best_mag {
            best = i;
            best_mag = mag;
        }
    }
    best
}

/// `2π ĵ / Np` with `ĵ` the (0-based) peak of `|b̂|`.
pub fn coarse_cfo(b_hat: &[Complex64]) -> Result<f64> {
    if b_hat.is_empty() {
        return Err(Error::InvalidDimension("empty CFO spectrum".into()));
    }
    check_finite(b_hat, "CFO spectrum")?;
    check_nonzero(b_hat, "CFO spectrum is all zero")?;
    Ok(wrap_to_2pi(2.0 * PI * peak_index(b_hat) as f64 / b_hat.len() as f64))
}

/// Fine CFO: rebuild the phasor `â = U_Np^* b̂`, take its zero-padded
/// `2Np`-point DFT and refine the peak with the bias-corrected three-bin
/// interpolator.
pub fn fine_cfo(b_hat: &[Complex64], n_p: usize) -> Result<f64> {
    if b_hat.len() != n_p {
        return Err(Error::DimensionMismatch {
            what: "CFO spectrum",
            expected: n_p,
            actual: b_hat.len(),
        });
    }
    if n_p == 0 {
        return Err(Error::InvalidDimension("empty CFO spectrum".into()));
    }
    check_finite(b_hat, "CFO spectrum")?;
    check_nonzero(b_hat, "CFO spectrum is all zero")?;

    let n = 2 * n_p;
    let mut buf = b_hat.to_vec();
    Dft::new(n_p).inverse(&mut buf);
    buf.resize(n, Complex64::new(0.0, 0.0));
    Dft::new(n).forward(&mut buf);

    let k = peak_index(&buf);
    let prev = buf[(k + n - 1) % n];
    let next = buf[(k + 1) % n];
    let denom = buf[k] * 2.0 - prev - next;
    let ratio = if denom.norm_sqr() > 0.0 {
        ((prev - next) / denom).re
    } else {
        0.0
    };
    let x = PI / n as f64;
    let delta = ratio * x.tan() / x;
    Ok(wrap_to_2pi(2.0 * PI / n as f64 * (k as f64 + delta)))
}

/// Full recovery chain from a lifted estimate.
pub fn recover(x_hat: &[Complex64], n_rx: usize, n_tx: usize, n_p: usize) -> Result<JointEstimate> {
    let factors = rank1_decompose(x_hat, n_p, n_rx * n_tx)?;
    let h_hat = reconstruct_channel(factors.c_hat.as_slice().expect("contiguous"), n_rx, n_tx)?;
    let b = factors.b_hat.as_slice().expect("contiguous");
    Ok(JointEstimate {
        omega_coarse: coarse_cfo(b)?,
        omega_hat: fine_cfo(b, n_p)?,
        h_hat,
        sigma1_ratio: factors.sigma1_ratio,
        b_hat: factors.b_hat,
        c_hat: factors.c_hat,
    })
}
