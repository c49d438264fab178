use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::output::{write_csv, write_manifest};
use crate::{audit, bench, ber};

#[derive(Debug, Parser)]
#[command(
    name = "seqdec",
    version,
    about = "Decoupled MU-MIMO detection simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML config, or a run manifest written by an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// `key=value` with a dotted key, e.g. `ber.snr_db=[0,10]`. Repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Monte-Carlo BER sweep; writes ber.csv.
    Ber,
    /// Decoupling and subspace equivalence audit; writes audit.csv.
    Audit,
    /// FLOP counts over K and M_i sweeps; writes flops.csv.
    Flops,
    /// User-inclusion FLOP sweep; writes include.csv.
    Include,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::Ber => "ber",
            Self::Audit => "audit",
            Self::Flops => "flops",
            Self::Include => "include",
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| SimError::Config("--config <file> is required".into()))?;
    let mut cfg = SimConfig::load(path, &cli.overrides)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    std::fs::create_dir_all(&cli.out).map_err(|e| SimError::io(&cli.out, e))?;
    let name = cli.command.name();
    let file = format!("{name}.csv");
    let csv_path = cli.out.join(&file);
    match cli.command {
        Command::Ber => {
            let res = ber::run_ber_sweep(&cfg)?;
            write_csv(&csv_path, ber::BerRecord::HEADER, &res.records())?;
            for c in &res.curves {
                for r in &c.aggregate {
                    eprintln!(
                        "{:>5} {:>6} {:>6.1} dB  ber {:.4e} +- {:.1e}",
                        r.decoupler, r.detector, r.snr_db, r.ber, r.stderr
                    );
                }
            }
        }
        Command::Audit => {
            let rep = audit::run_equivalence_audit(&cfg)?;
            write_csv(&csv_path, audit::AuditRecord::HEADER, &rep.records)?;
            for d in ["sd", "svd", "pinv", "shuffled"] {
                eprintln!(
                    "{d:>8}: max cross-residual {:.3e}",
                    rep.max_of(d, |r| Some(r.max_cross_residual))
                );
            }
            eprintln!(
                "      sd: max subspace distance to svd {:.3e}",
                rep.max_of("sd", |r| r.max_subspace_distance)
            );
            eprintln!("audit {}", if rep.passed() { "passed" } else { "FAILED" });
        }
        Command::Flops => {
            let rows = bench::run_flop_bench(&cfg)?;
            write_csv(&csv_path, bench::FlopRecord::HEADER, &rows)?;
        }
        Command::Include => {
            let rows = bench::run_include_bench(&cfg)?;
            write_csv(&csv_path, bench::IncludeRecord::HEADER, &rows)?;
        }
    }
    write_manifest(&cli.out, name, &cfg, &[&file])?;
    Ok(())
}
