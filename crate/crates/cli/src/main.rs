use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use onebit_cfo::experiment::{
    emit_csv, format_summary, paper_preset, run_experiment, CfoSetting, ExperimentConfig,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    Paper,
}

/// Run Monte Carlo trials of joint CFO and channel estimation with one-bit ADCs
/// and write one CSV row per trial.
#[derive(Debug, Parser)]
#[command(name = "onebit-sim", version)]
struct Args {
    /// TOML experiment config; keys are validated strictly.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Built-in configuration.
    #[arg(long, value_enum)]
    preset: Option<Preset>,

    /// Comma-separated SNR values in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,

    /// Comma-separated pilot lengths.
    #[arg(long = "np", value_delimiter = ',')]
    n_p: Option<Vec<usize>>,

    #[arg(long)]
    trials: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn apply_overrides(mut cfg: ExperimentConfig, args: &Args) -> Result<ExperimentConfig, String> {
    if let Some(n_p) = &args.n_p {
        if let CfoSetting::Explicit { delta_f_hz } = &cfg.cfo {
            // keep each pilot length's offset; new lengths need the half-bin mode
            let remapped = n_p
                .iter()
                .map(|n| {
                    cfg.n_p_list
                        .iter()
                        .position(|m| m == n)
                        .map(|i| delta_f_hz[i])
                        .ok_or_else(|| {
                            format!(
                                "no CFO configured for n_p = {n}; set cfo.mode = \"half-bin\" in a config file"
                            )
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            cfg.cfo = CfoSetting::Explicit {
                delta_f_hz: remapped,
            };
        }
        cfg.n_p_list = n_p.clone();
    }
    if let Some(snr) = &args.snr {
        cfg.snr_db_list = snr.clone();
    }
    if let Some(t) = args.trials {
        cfg.n_trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.output_path = o.clone();
    }
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    Ok(cfg)
}

fn run(args: Args) -> Result<(), String> {
    let base = match (&args.config, args.preset) {
        (Some(path), _) => ExperimentConfig::from_file(path).map_err(|e| e.to_string())?,
        (None, Some(Preset::Paper)) | (None, None) => paper_preset(),
    };
    let cfg = apply_overrides(base, &args)?;
    cfg.validate().map_err(|e| e.to_string())?;

    let result = run_experiment(&cfg).map_err(|e| e.to_string())?;
    emit_csv(&result.records, &cfg.output_path).map_err(|e| e.to_string())?;
    print!("{}", format_summary(&result.summary));
    println!(
        "wrote {} records to {}",
        result.records.len(),
        cfg.output_path.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
