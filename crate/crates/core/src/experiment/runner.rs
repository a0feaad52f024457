use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::seed::trial_seed;
use crate::channel::sample_channel;
use crate::error::{Error, Result};
use crate::frontend::{gen_training, simulate_onebit, snr_to_radius, CfoParams};
use crate::metrics::{cfo_squared_error, channel_nmse, rate_lower_bound};
use crate::pipeline::estimate_joint;

/// One row of the output CSV. Metric fields are NaN for diverged trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub snr_db: f64,
    pub n_p: usize,
    pub trial: usize,
    pub seed: u64,
    pub nmse_db: f64,
    pub cfo_sq_err: f64,
    pub rate_bits: f64,
    pub gamp_iters: usize,
    pub sigma1_ratio: f64,
    pub runtime_ms: f64,
    pub diverged: bool,
}

/// Aggregates for one `(n_p, snr)` cell over its non-diverged trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n_p: usize,
    pub snr_db: f64,
    pub trials: usize,
    pub diverged: usize,
    /// Mean of the per-trial norm ratios `‖H − γĤ‖/‖H‖`.
    pub mean_nmse: f64,
    /// `20 log10(mean_nmse)`.
    pub mean_nmse_db: f64,
    pub cfo_mse: f64,
    pub mean_rate: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<CellSummary>,
}

/// Run a single `(n_p, snr, trial)` cell.
pub fn run_trial(cfg: &ExperimentConfig, np_index: usize, snr_db: f64, trial: usize) -> Result<TrialRecord> {
    let start = Instant::now();
    let n_p = cfg.n_p_list[np_index];
    let seed = trial_seed(cfg.seed, n_p, snr_db, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let h = sample_channel(&cfg.channel, &mut rng)?;
    let radius = snr_to_radius(snr_db, cfg.n_tx())?;
    let training = gen_training(cfg.n_tx(), n_p, radius, &mut rng)?;
    let cfo = CfoParams::from_offset(cfg.delta_f_hz(np_index), cfg.symbol_period_s)?;
    let y = simulate_onebit(&h, &training, cfo, &mut rng)?;

    let mut record = TrialRecord {
        snr_db,
        n_p,
        trial,
        seed,
        nmse_db: f64::NAN,
        cfo_sq_err: f64::NAN,
        rate_bits: f64::NAN,
        gamp_iters: 0,
        sigma1_ratio: f64::NAN,
        runtime_ms: 0.0,
        diverged: false,
    };
    match estimate_joint(&y, &training, &cfg.gamp) {
        Ok(out) => {
            let est = &out.estimate;
            record.nmse_db = channel_nmse(&h, &est.h_hat)?.db;
            record.cfo_sq_err = cfo_squared_error(cfo.omega_e(), est.omega_hat);
            record.rate_bits = rate_lower_bound(&h, &est.h_hat, snr_db)?;
            record.gamp_iters = out.diagnostics.iterations;
            record.sigma1_ratio = est.sigma1_ratio;
        }
        Err(Error::Diverged(diag)) => {
            record.diverged = true;
            record.gamp_iters = diag.iterations;
        }
        Err(Error::Degenerate(_)) => record.diverged = true,
        Err(e) => return Err(e),
    }
    if cfg.record_timing {
        record.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    Ok(record)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let cells: Vec<(usize, usize, usize)> = (0..cfg.n_p_list.len())
        .flat_map(|p| {
            (0..cfg.snr_db_list.len()).flat_map(move |s| (0..cfg.n_trials).map(move |t| (p, s, t)))
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let mut keyed: Vec<((usize, usize, usize), TrialRecord)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(p, s, t)| run_trial(cfg, p, cfg.snr_db_list[s], t).map(|r| ((p, s, t), r)))
            .collect::<Result<Vec<_>>>()
    })?;
    keyed.sort_by_key(|(k, _)| *k);
    let records: Vec<TrialRecord> = keyed.into_iter().map(|(_, r)| r).collect();
    let summary = summarize(cfg, &records);
    Ok(ExperimentResult { records, summary })
}

/// Per-cell aggregates in `n_p_list` × `snr_db_list` order.
pub fn summarize(cfg: &ExperimentConfig, records: &[TrialRecord]) -> Vec<CellSummary> {
    let mut out = Vec::new();
    for &n_p in &cfg.n_p_list {
        for &snr_db in &cfg.snr_db_list {
            let cell: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.n_p == n_p && r.snr_db == snr_db)
                .collect();
            let ok: Vec<&&TrialRecord> = cell.iter().filter(|r| !r.diverged).collect();
            let mean = |f: &dyn Fn(&TrialRecord) -> f64| {
                if ok.is_empty() {
                    f64::NAN
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
                }
            };
            let mean_nmse = mean(&|r| 10f64.powf(r.nmse_db / 20.0));
            out.push(CellSummary {
                n_p,
                snr_db,
                trials: cell.len(),
                diverged: cell.len() - ok.len(),
                mean_nmse,
                mean_nmse_db: 20.0 * mean_nmse.log10(),
                cfo_mse: mean(&|r| r.cfo_sq_err),
                mean_rate: mean(&|r| r.rate_bits),
            });
        }
    }
    out
}

pub fn format_summary(summary: &[CellSummary]) -> String {
    let mut s = format!(
        "{:>5} {:>8} {:>7} {:>9} {:>12} {:>13} {:>11}\n",
        "n_p", "snr_db", "trials", "diverged", "nmse_db", "cfo_mse", "rate_bits"
    );
    for c in summary {
        s.push_str(&format!(
            "{:>5} {:>8.2} {:>7} {:>9} {:>12.3} {:>13.4e} {:>11.4}\n",
            c.n_p, c.snr_db, c.trials, c.diverged, c.mean_nmse_db, c.cfo_mse, c.mean_rate
        ));
    }
    s
}
