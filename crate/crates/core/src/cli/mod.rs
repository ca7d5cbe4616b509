//! `speclocate` command line.
//!
//! ```text
//! speclocate generate    [--config F] [--seed N] [--out DIR]
//! speclocate detect      --record STEM [--config F] [--emit-mask] [--filters P] [--out DIR]
//! speclocate score-masks --masks DIR --records DIR [--config F] [--filters P] [--out DIR]
//! speclocate evaluate    [--config F] [--seed N] [--filters P] [--out DIR]
//! ```
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error,
//! 4 degenerate noise histogram.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::clustering::FilterPolicy;
use crate::error::{Error, Result};
use crate::Exec;

pub use commands::{
    build_manifest, cmd_detect, cmd_evaluate, cmd_generate, cmd_score_masks, evaluation_case, read_manifest,
    record_stem, DetectOutputs, Manifest, ManifestEntry, Split, MANIFEST_FILE,
};
pub use config::{default_test_burst, EvaluateConfig, GenerateConfig, RunConfig, ScoreConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "speclocate", version, about = "Wideband signal localization toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Detection filters, e.g. `contained-merge,min-area=4` or `none`.
    #[arg(long, global = true)]
    pub filters: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Run single-threaded.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize SigMF records and a manifest.
    Generate {
        #[command(flatten)]
        common: Common,
    },
    /// Run the radiometer pipeline on one record.
    Detect {
        #[command(flatten)]
        common: Common,
        /// SigMF stem of the record.
        #[arg(long)]
        record: PathBuf,
        /// Also write the decision mask (SGM1) and noise model.
        #[arg(long)]
        emit_mask: bool,
    },
    /// Score SGM1 masks against annotated records.
    ScoreMasks {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        masks: PathBuf,
        #[arg(long)]
        records: PathBuf,
    },
    /// Sweep SNR and report precision and recall.
    Evaluate {
        #[command(flatten)]
        common: Common,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Config(_) | Error::InvalidArgument(_) | Error::Layout(_) | Error::UnsupportedModulation(_) => {
            EXIT_CONFIG
        }
        Error::DegenerateHistogram { .. } => EXIT_DEGENERATE,
        _ => EXIT_DATA,
    }
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(f) = &common.filters {
        cfg.pipeline.filters = f.parse::<FilterPolicy>()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exec(common: &Common) -> Exec {
    if common.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn out_dir(common: &Common, fallback: &Path) -> PathBuf {
    common.out.clone().unwrap_or_else(|| fallback.to_path_buf())
}

/// Execute a parsed command, printing a one-line summary to stdout.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common } => {
            let cfg = load_config(&common)?;
            let out = out_dir(&common, Path::new("."));
            let m = cmd_generate(&cfg, &out, exec(&common))?;
            println!("wrote {} records and {} to {}", m.records.len(), MANIFEST_FILE, out.display());
        }
        Command::Detect { common, record, emit_mask } => {
            let cfg = load_config(&common)?;
            let fallback = record.parent().map(Path::to_path_buf).unwrap_or_default();
            let out = out_dir(&common, &fallback);
            let r = cmd_detect(&cfg, &record, &out, emit_mask, exec(&common))?;
            println!("{} boxes -> {}", r.document.boxes.len(), r.detections_path.display());
        }
        Command::ScoreMasks { common, masks, records } => {
            let cfg = load_config(&common)?;
            let report = cmd_score_masks(&cfg, &masks, &records, exec(&common))?;
            print!("{}", report.to_csv());
            if let Some(out) = &common.out {
                std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
                let p = out.join("score.csv");
                std::fs::write(&p, report.to_csv()).map_err(|e| Error::io(&p, e))?;
            }
        }
        Command::Evaluate { common } => {
            let cfg = load_config(&common)?;
            let out = out_dir(&common, Path::new("."));
            let report = cmd_evaluate(&cfg, &out, exec(&common))?;
            println!("{} rows -> {}", report.rows.len(), out.join("report.csv").display());
        }
    }
    Ok(())
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e.root(), Error::DegenerateHistogram { .. }) {
                eprintln!(
                    "hint: the noise histogram needs a noise floor; check that the record contains noise \
                     and is not dominated by signal, or raise the number of channels"
                );
            }
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}
