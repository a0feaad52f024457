//! Python bindings. Matrices cross the boundary as lists of rows of complex
//! numbers.
//!
//!     import pyonebit
//!     cfg = pyonebit.ExperimentConfig.paper()
//!     cfg.n_trials = 5
//!     records, csv_text = cfg.run()

use ndarray::Array2;
use onebit_cfo::channel::{self, ChannelMatrix};
use onebit_cfo::experiment::{self, CfoSetting, TrialRecord};
use onebit_cfo::frontend::{self, CfoParams};
use onebit_cfo::gamp::GampConfig;
use onebit_cfo::metrics;
use onebit_cfo::pipeline::estimate_joint;
use onebit_cfo::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Rows = Vec<Vec<Complex64>>;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rows(m: &Array2<Complex64>) -> Rows {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn from_rows(rows: Rows) -> PyResult<ChannelMatrix> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n_cols) {
        return Err(err("ragged matrix"));
    }
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((n_rows, n_cols), flat).map(ChannelMatrix).map_err(err)
}

/// Experiment configuration. Edit fields in place, then `run()`.
#[pyclass(name = "ExperimentConfig")]
struct PyExperimentConfig {
    inner: experiment::ExperimentConfig,
}

#[pymethods]
impl PyExperimentConfig {
    /// The reference 16×16 setup with 32 and 64 pilots.
    #[staticmethod]
    fn paper() -> Self {
        Self {
            inner: experiment::paper_preset(),
        }
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let inner = experiment::ExperimentConfig::from_toml_str(text).map_err(err)?;
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml_string()
    }

    #[getter]
    fn n_p_list(&self) -> Vec<usize> {
        self.inner.n_p_list.clone()
    }

    /// Setting new pilot lengths switches the CFO to the half-bin rule at
    /// `target_hz` unless every length already has an explicit offset.
    #[setter]
    fn set_n_p_list(&mut self, n_p: Vec<usize>) -> PyResult<()> {
        if let CfoSetting::Explicit { delta_f_hz } = &self.inner.cfo {
            let remapped: Option<Vec<f64>> = n_p
                .iter()
                .map(|n| self.inner.n_p_list.iter().position(|m| m == n).map(|i| delta_f_hz[i]))
                .collect();
            match remapped {
                Some(delta_f_hz) => self.inner.cfo = CfoSetting::Explicit { delta_f_hz },
                None => return Err(err("no CFO for some pilot length; call set_half_bin_cfo first")),
            }
        }
        self.inner.n_p_list = n_p;
        Ok(())
    }

    fn set_half_bin_cfo(&mut self, target_hz: f64) {
        self.inner.cfo = CfoSetting::HalfBin { target_hz };
    }

    #[getter]
    fn snr_db_list(&self) -> Vec<f64> {
        self.inner.snr_db_list.clone()
    }

    #[setter]
    fn set_snr_db_list(&mut self, v: Vec<f64>) {
        self.inner.snr_db_list = v;
    }

    #[getter]
    fn n_trials(&self) -> usize {
        self.inner.n_trials
    }

    #[setter]
    fn set_n_trials(&mut self, v: usize) {
        self.inner.n_trials = v;
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, v: u64) {
        self.inner.seed = v;
    }

    #[getter]
    fn threads(&self) -> usize {
        self.inner.threads
    }

    #[setter]
    fn set_threads(&mut self, v: usize) {
        self.inner.threads = v;
    }

    /// `(n_rx, n_tx)`.
    #[getter]
    fn antennas(&self) -> (usize, usize) {
        (self.inner.n_rx(), self.inner.n_tx())
    }

    #[setter]
    fn set_antennas(&mut self, v: (usize, usize)) {
        self.inner.channel.n_rx = v.0;
        self.inner.channel.n_tx = v.1;
    }

    /// Channel drawn from this config's clustered model.
    fn sample_channel(&self, seed: u64) -> PyResult<Rows> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = channel::sample_channel(&self.inner.channel, &mut rng).map_err(err)?;
        Ok(to_rows(&h.0))
    }

    /// Run every trial; returns `(records, csv_text)`.
    fn run(&self, py: Python<'_>) -> PyResult<(Vec<PyTrialRecord>, String)> {
        self.inner.validate().map_err(err)?;
        let cfg = self.inner.clone();
        let result = py.detach(move || experiment::run_experiment(&cfg)).map_err(err)?;
        let csv = experiment::to_csv_string(&result.records);
        Ok((result.records.into_iter().map(PyTrialRecord::from).collect(), csv))
    }

    fn __repr__(&self) -> String {
        format!(
            "ExperimentConfig(n_p_list={:?}, snr_db_list={:?}, n_trials={}, seed={})",
            self.inner.n_p_list, self.inner.snr_db_list, self.inner.n_trials, self.inner.seed
        )
    }
}

/// One CSV row.
#[pyclass(name = "TrialRecord", get_all, frozen)]
struct PyTrialRecord {
    snr_db: f64,
    n_p: usize,
    trial: usize,
    seed: u64,
    nmse_db: f64,
    cfo_sq_err: f64,
    rate_bits: f64,
    gamp_iters: usize,
    sigma1_ratio: f64,
    runtime_ms: f64,
    diverged: bool,
}

impl From<TrialRecord> for PyTrialRecord {
    fn from(r: TrialRecord) -> Self {
        Self {
            snr_db: r.snr_db,
            n_p: r.n_p,
            trial: r.trial,
            seed: r.seed,
            nmse_db: r.nmse_db,
            cfo_sq_err: r.cfo_sq_err,
            rate_bits: r.rate_bits,
            gamp_iters: r.gamp_iters,
            sigma1_ratio: r.sigma1_ratio,
            runtime_ms: r.runtime_ms,
            diverged: r.diverged,
        }
    }
}

#[pymethods]
impl PyTrialRecord {
    fn __repr__(&self) -> String {
        format!(
            "TrialRecord(n_p={}, snr_db={}, trial={}, nmse_db={:.3}, diverged={})",
            self.n_p, self.snr_db, self.trial, self.nmse_db, self.diverged
        )
    }
}

/// CFO and channel recovered from one block. `h_hat` and `b_hat` are only
/// defined up to a complex scale.
#[pyclass(name = "JointEstimate", get_all, frozen)]
struct PyJointEstimate {
    h_hat: Rows,
    b_hat: Vec<Complex64>,
    omega_coarse: f64,
    omega_hat: f64,
    sigma1_ratio: f64,
    gamp_iters: usize,
}

/// Simulate one-bit pilots through `h` with CFO `omega_e` and estimate both.
#[pyfunction]
#[pyo3(signature = (h, n_p, snr_db, omega_e, seed))]
fn estimate(py: Python<'_>, h: Rows, n_p: usize, snr_db: f64, omega_e: f64, seed: u64) -> PyResult<PyJointEstimate> {
    let h = from_rows(h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = frontend::snr_to_radius(snr_db, h.n_tx()).map_err(err)?;
    let training = frontend::gen_training(h.n_tx(), n_p, radius, &mut rng).map_err(err)?;
    let cfo = CfoParams::new(omega_e).map_err(err)?;
    let y = frontend::simulate_onebit(&h, &training, cfo, &mut rng).map_err(err)?;
    let out = py
        .detach(|| estimate_joint(&y, &training, &GampConfig::default()))
        .map_err(err)?;
    let est = out.estimate;
    Ok(PyJointEstimate {
        h_hat: to_rows(&est.h_hat.0),
        b_hat: est.b_hat.to_vec(),
        omega_coarse: est.omega_coarse,
        omega_hat: est.omega_hat,
        sigma1_ratio: est.sigma1_ratio,
        gamp_iters: out.diagnostics.iterations,
    })
}

/// Vandermonde ULA response `[e^{j k θ}]`.
#[pyfunction]
fn array_response(n: usize, theta: f64) -> PyResult<Vec<Complex64>> {
    channel::array_response(n, theta).map(|a| a.to_vec()).map_err(err)
}

#[pyfunction]
fn to_beamspace(h: Rows) -> PyResult<Rows> {
    Ok(to_rows(&channel::to_beamspace(&from_rows(h)?).0))
}

#[pyfunction]
fn snr_to_radius(snr_db: f64, n_tx: usize) -> PyResult<f64> {
    frontend::snr_to_radius(snr_db, n_tx).map_err(err)
}

/// One-bit quantizer on the real and imaginary parts.
#[pyfunction]
fn quantize(z: Complex64) -> PyResult<Complex64> {
    frontend::quantize_sample(z).map_err(err)
}

/// Scale-invariant NMSE in dB.
#[pyfunction]
fn channel_nmse_db(h: Rows, h_hat: Rows) -> PyResult<f64> {
    metrics::channel_nmse(&from_rows(h)?, &from_rows(h_hat)?)
        .map(|n| n.db)
        .map_err(err)
}

#[pyfunction]
fn cfo_squared_error(omega_true: f64, omega_hat: f64) -> f64 {
    metrics::cfo_squared_error(omega_true, omega_hat)
}

#[pyfunction]
fn rate_lower_bound(h: Rows, h_hat: Rows, snr_db: f64) -> PyResult<f64> {
    metrics::rate_lower_bound(&from_rows(h)?, &from_rows(h_hat)?, snr_db).map_err(err)
}

#[pymodule]
fn pyonebit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExperimentConfig>()?;
    m.add_class::<PyTrialRecord>()?;
    m.add_class::<PyJointEstimate>()?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(array_response, m)?)?;
    m.add_function(wrap_pyfunction!(to_beamspace, m)?)?;
    m.add_function(wrap_pyfunction!(snr_to_radius, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(channel_nmse_db, m)?)?;
    m.add_function(wrap_pyfunction!(cfo_squared_error, m)?)?;
    m.add_function(wrap_pyfunction!(rate_lower_bound, m)?)?;
    Ok(())
}
