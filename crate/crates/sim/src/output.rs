//! CSV tables and the JSON run manifest.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::ber::SNR_DEFINITION;
use crate::config::SimConfig;
use crate::error::{Result, SimError};

/// Writes `header` and then one record per row. An empty `rows` still
/// yields the header line.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| SimError::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| SimError::io(path, e))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub threads: usize,
    pub snr_definition: &'static str,
    pub cost_model: &'a seqdec_core::flops::CostModel,
    pub outputs: Vec<String>,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub created_unix: u64,
    /// Complete configuration; pass this file back with `--config` to
    /// repeat the run.
    pub config: &'a SimConfig,
}

pub fn write_manifest(dir: &Path, command: &str, cfg: &SimConfig, outputs: &[&str]) -> Result<()> {
    let manifest = Manifest {
        tool: "seqdec",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: cfg.seed,
        threads: cfg.threads,
        snr_definition: SNR_DEFINITION,
        cost_model: &cfg.cost_model,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        config: cfg,
    };
    let path = dir.join(format!("{command}_manifest.json"));
    let mut file = File::create(&path).map_err(|e| SimError::io(&path, e))?;
    serde_json::to_writer_pretty(&mut file, &manifest)?;
    file.write_all(b"\n").map_err(|e| SimError::io(&path, e))?;
    Ok(())
}
