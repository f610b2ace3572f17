// SPDX-License-Identifier: Apache-2.0

mod config;
mod experiments;
mod output;

use clap::Parser;
use config::{Experiment, Format, Overrides};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

/// Fisher information and Cramér-Rao bounds for sequential ancilla-assisted
/// displacement sensing.
#[derive(Parser, Debug)]
#[command(name = "seqmeas", version)]
struct Cli {
    experiment: Experiment,
    /// TOML config; defaults are used for anything it leaves out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run the two-parameter comparison at its full size instead of the desk default.
    #[arg(long)]
    full_scale: bool,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("seqmeas: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(p) => match config::load(p) {
            Ok(f) => f,
            Err(e) => return fail(EXIT_CONFIG, e),
        },
        None => config::FileConfig::default(),
    };
    let ov = Overrides { out: cli.out, format: cli.format, workers: cli.workers, seed: cli.seed, full_scale: cli.full_scale };
    let cfg = match config::resolve(cli.experiment, file, ov) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if cfg.full_scale && cfg.experiment == Experiment::TwoParamCompare {
        eprintln!(
            "seqmeas: warning: full-scale run uses {}-dimensional complex eigensolves; expect hours of runtime and several GB of memory per worker",
            (config::FULL_TWO_PARAM_N + 1).pow(2)
        );
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(p) => p,
        Err(e) => return fail(EXIT_RESOURCE, format!("worker pool: {e}")),
    };
    let report = match pool.install(|| experiments::run(&cfg)) {
        Ok(r) => r,
        Err(e) => {
            let code = match e {
                experiments::RunError::Config(_) => EXIT_CONFIG,
                experiments::RunError::Resource(_) => EXIT_RESOURCE,
                _ => EXIT_VALIDATION,
            };
            return fail(code, e);
        }
    };

    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = output::metadata(&cfg, stamp);
    let written = match &cfg.out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            output::write(&mut w, cfg.format, &report.table, &meta)?;
            w.flush()
        }),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            output::write(&mut lock, cfg.format, &report.table, &meta)
        }
    };
    if let Err(e) = written {
        return fail(EXIT_VALIDATION, format!("writing output: {e}"));
    }
    if !report.failed.is_empty() {
        return fail(EXIT_VALIDATION, format!("failed checks: {}", report.failed.join(", ")));
    }
    ExitCode::SUCCESS
}
