use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::ChannelModelConfig;
use crate::error::{Error, Result};
use crate::gamp::GampConfig;

/// How the carrier frequency offset is chosen for each pilot length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CfoSetting {
    /// One offset in Hz per entry of `n_p_list`.
    Explicit { delta_f_hz: Vec<f64> },
    /// Worst case for DFT estimation: the half-integer bin count nearest
    /// below-or-at `target_hz`, i.e. `Δf Np T = floor(target Np T) + 0.5`.
    HalfBin { target_hz: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub n_p_list: Vec<usize>,
    pub snr_db_list: Vec<f64>,
    pub n_trials: usize,
    pub seed: u64,
    pub carrier_hz: f64,
    pub symbol_period_s: f64,
    pub output_path: PathBuf,
    /// Worker threads; 0 picks the number of cores.
    pub threads: usize,
    /// Fill `runtime_ms` with wall-clock times. Off by default so that
    /// repeated runs produce identical files.
    pub record_timing: bool,
    pub cfo: CfoSetting,
    pub channel: ChannelModelConfig,
    pub gamp: GampConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        super::paper_preset()
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg = Self::from_toml_str(&text).map_err(|message| Error::ConfigParse {
            path: path.to_path_buf(),
            message,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn n_tx(&self) -> usize {
        self.channel.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.channel.n_rx
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n_trials == 0 {
            return bad("n_trials must be at least 1");
        }
        if self.n_p_list.is_empty() || self.snr_db_list.is_empty() {
            return bad("n_p_list and snr_db_list must be nonempty");
        }
        if self.n_p_list.iter().any(|&n| n < 2) {
            return bad("pilot lengths must be at least 2");
        }
        if self.snr_db_list.iter().any(|s| !s.is_finite()) {
            return bad("SNR values must be finite");
        }
        if !(self.symbol_period_s > 0.0 && self.symbol_period_s.is_finite()) {
            return bad("symbol_period_s must be positive");
        }
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return bad("carrier_hz must be positive");
        }
        match &self.cfo {
            CfoSetting::Explicit { delta_f_hz } => {
                if delta_f_hz.len() != self.n_p_list.len() {
                    return bad("cfo.delta_f_hz needs one entry per pilot length");
                }
                if delta_f_hz.iter().any(|f| !f.is_finite()) {
                    return bad("cfo.delta_f_hz values must be finite");
                }
            }
            CfoSetting::HalfBin { target_hz } => {
                if !(*target_hz >= 0.0 && target_hz.is_finite()) {
                    return bad("cfo.target_hz must be nonnegative");
                }
            }
        }
        self.channel.validate()?;
        self.gamp.validate()?;
        Ok(())
    }

    /// CFO in Hz for the `index`-th pilot length.
    pub fn delta_f_hz(&self, index: usize) -> f64 {
        let n_p = self.n_p_list[index];
        match &self.cfo {
            CfoSetting::Explicit { delta_f_hz } => delta_f_hz[index],
            CfoSetting::HalfBin { target_hz } => {
                let bin = n_p as f64 * self.symbol_period_s;
                ((target_hz * bin).floor() + 0.5) / bin
            }
        }
    }
}
