//! Transmit training, CFO rotation, receiver noise and one-bit quantization.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{complex_normal, ChannelMatrix};
use crate::error::{Error, Result};

/// QPSK radius `r` giving `SNR = 10 log10(Ntx r²)` at unit noise variance.
pub fn snr_to_radius(snr_db: f64, n_tx: usize) -> Result<f64> {
    if n_tx == 0 {
        return Err(Error::InvalidDimension("n_tx must be >= 1".into()));
    }
    if !snr_db.is_finite() {
        return Err(Error::NonFinite("snr_db"));
    }
    Ok((10f64.powf(snr_db / 10.0) / n_tx as f64).sqrt())
}

/// `Ntx × Np` pilot matrix with IID QPSK entries of magnitude `radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingBlock {
    pub symbols: Array2<Complex64>,
    pub radius: f64,
}

impl TrainingBlock {
    pub fn n_tx(&self) -> usize {
        self.symbols.nrows()
    }

    pub fn n_p(&self) -> usize {
        self.symbols.ncols()
    }
}

pub fn gen_training<R: Rng + ?Sized>(
    n_tx: usize,
    n_p: usize,
    radius: f64,
    rng: &mut R,
) -> Result<TrainingBlock> {
    if n_tx == 0 || n_p == 0 {
        return Err(Error::InvalidDimension("training needs n_tx, n_p >= 1".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidConfig("QPSK radius must be positive".into()));
    }
    let a = radius * FRAC_1_SQRT_2;
    let symbols = Array2::from_shape_simple_fn((n_tx, n_p), || {
        let re = if rng.random::<bool>() { a } else { -a };
        let im = if rng.random::<bool>() { a } else { -a };
        Complex64::new(re, im)
    });
    Ok(TrainingBlock { symbols, radius })
}

/// Digital-domain CFO in radians per sample, held in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfoParams {
    omega_e: f64,
}

impl CfoParams {
    pub fn new(omega_e: f64) -> Result<Self> {
        if !omega_e.is_finite() {
            return Err(Error::NonFinite("omega_e"));
        }
        Ok(Self {
            omega_e: wrap_to_2pi(omega_e),
        })
    }

    /// `ω_e = 2π Δf_c T`.
    pub fn from_offset(delta_f_hz: f64, symbol_period_s: f64) -> Result<Self> {
        Self::new(2.0 * PI * delta_f_hz * symbol_period_s)
    }

    pub fn omega_e(&self) -> f64 {
        self.omega_e
    }
}

pub(crate) fn wrap_to_2pi(w: f64) -> f64 {
    let r = w.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Offset in units of the `1/(Np T)` DFT bin width.
pub fn cfo_in_bins(delta_f_hz: f64, n_p: usize, symbol_period_s: f64) -> f64 {
    delta_f_hz * n_p as f64 * symbol_period_s
}

/// `Nrx × Np` block whose entries are all in `{±1 ± j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedBlock(pub Array2<Complex64>);

impl QuantizedBlock {
    /// `vec(Y^T)`: entry `r·Np + n` holds antenna `r` at time `n`.
    pub fn to_measurement_vector(&self) -> Vec<Complex64> {
        self.0.iter().copied().collect()
    }
}

fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `sgn(Re z) + j sgn(Im z)` with `sgn(0) = +1`.
pub fn quantize_sample(z: Complex64) -> Result<Complex64> {
    if z.re.is_nan() || z.im.is_nan() {
        return Err(Error::NonFinite("quantizer input is NaN"));
    }
    Ok(Complex64::new(sgn(z.re), sgn(z.im)))
}

pub fn quantize_onebit(x: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let mut out = Array2::zeros(x.raw_dim());
    for (o, z) in out.iter_mut().zip(x.iter()) {
        *o = quantize_sample(*z)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxOptions {
    pub quantize: bool,
    /// Per-entry complex noise variance. Zero disables noise.
    pub noise_variance: f64,
}

impl Default for RxOptions {
    fn default() -> Self {
        Self {
            quantize: true,
            noise_variance: 1.0,
        }
    }
}

/// `Y = Q(H T diag(a_Np(ω_e)) + N)`, or the unquantized block when
/// `opts.quantize` is off.
pub fn simulate_rx<R: Rng + ?Sized>(
    h: &ChannelMatrix,
    t: &TrainingBlock,
    cfo: CfoParams,
    rng: &mut R,
    opts: RxOptions,
) -> Result<Array2<Complex64>> {
    if h.n_tx() != t.n_tx() {
        return Err(Error::DimensionMismatch {
            what: "channel columns vs training rows",
            expected: h.n_tx(),
            actual: t.n_tx(),
        });
    }
    let mut y = h.0.dot(&t.symbols);
    for (n, mut col) in y.columns_mut().into_iter().enumerate() {
        let rot = Complex64::from_polar(1.0, cfo.omega_e() * n as f64);
        col.mapv_inplace(|z| z * rot);
    }
    if opts.noise_variance > 0.0 {
        // row-major draw order keeps the noise stream independent of layout
        for z in y.iter_mut() {
            *z += complex_normal(rng, opts.noise_variance);
        }
    }
    if opts.quantize {
        quantize_onebit(&y)
    } else {
        Ok(y)
    }
}

pub fn simulate_onebit<R: Rng + ?Sized>(
    h: &ChannelMatrix,
    t: &TrainingBlock,
    cfo: CfoParams,
    rng: &mut R,
) -> Result<QuantizedBlock> {
    simulate_rx(h, t, cfo, rng, RxOptions::default()).map(QuantizedBlock)
}
