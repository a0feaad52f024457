//! CSV output for trial records.
//!
//! Real-valued fields use scientific notation with 9 significant digits;
//! counts, seeds and the divergence flag are written as integers.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::runner::TrialRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "snr_db,n_p,trial,seed,nmse_db,cfo_sq_err,rate_bits,gamp_iters,sigma1_ratio,runtime_ms,diverged";

fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn write_csv<W: Write>(records: &[TrialRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            sci(r.snr_db),
            r.n_p,
            r.trial,
            r.seed,
            sci(r.nmse_db),
            sci(r.cfo_sq_err),
            sci(r.rate_bits),
            r.gamp_iters,
            sci(r.sigma1_ratio),
            sci(r.runtime_ms),
            u8::from(r.diverged)
        )?;
    }
    Ok(())
}

pub fn to_csv_string(records: &[TrialRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

/// Write `records` to `path`. Nothing is created when `records` is empty.
pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidConfig("no records to write".into()));
    }
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, to_csv_string(records)).map_err(io)
}

pub fn parse_csv(text: &str) -> std::result::Result<Vec<TrialRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 11 {
                return Err(format!("line {}: expected 11 fields, got {}", i + 2, f.len()));
            }
            let real = |s: &str| s.parse::<f64>().map_err(|e| format!("line {}: {e}", i + 2));
            let int = |s: &str| s.parse::<u64>().map_err(|e| format!("line {}: {e}", i + 2));
            Ok(TrialRecord {
                snr_db: real(f[0])?,
                n_p: int(f[1])? as usize,
                trial: int(f[2])? as usize,
                seed: int(f[3])?,
                nmse_db: real(f[4])?,
                cfo_sq_err: real(f[5])?,
                rate_bits: real(f[6])?,
                gamp_iters: int(f[7])? as usize,
                sigma1_ratio: real(f[8])?,
                runtime_ms: real(f[9])?,
                diverged: int(f[10])? != 0,
            })
        })
        .collect()
}
