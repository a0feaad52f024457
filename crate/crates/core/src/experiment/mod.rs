//! Monte Carlo harness: configuration, per-trial execution, aggregation and
//! CSV output.

mod config;
mod csv;
mod runner;
pub mod seed;

use std::path::PathBuf;

pub use config::{CfoSetting, ExperimentConfig};
pub use csv::{emit_csv, parse_csv, to_csv_string, write_csv, CSV_HEADER};
pub use runner::{
    format_summary, run_experiment, run_trial, summarize, CellSummary, ExperimentResult, TrialRecord,
};

use crate::channel::ChannelModelConfig;
use crate::gamp::GampConfig;

/// The reference setup: 16×16 half-wavelength ULAs, two clusters of 15 rays
/// with 10° spread, `T = 0.5 µs` at 28 GHz, and 32 or 64 pilots with
/// half-bin offsets of 93.75 kHz and 109.375 kHz respectively.
pub fn paper_preset() -> ExperimentConfig {
    ExperimentConfig {
        n_p_list: vec![32, 64],
        snr_db_list: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0],
        n_trials: 100,
        seed: 20_170_424,
        carrier_hz: 28e9,
        symbol_period_s: 0.5e-6,
        output_path: PathBuf::from("results.csv"),
        threads: 0,
        record_timing: false,
        cfo: CfoSetting::Explicit {
            delta_f_hz: vec![93.75e3, 109.375e3],
        },
        channel: ChannelModelConfig {
            n_tx: 16,
            n_rx: 16,
            n_clusters: 2,
            rays_per_cluster: 15,
            angle_spread_deg: 10.0,
            antenna_spacing_ratio: 0.5,
        },
        gamp: GampConfig::default(),
    }
}
