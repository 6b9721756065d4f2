//! `whq`: runs one configured computation and writes CSV tables, a manifest and optional SVG plots.
//!
//! Exit status: 0 success, 2 invalid configuration or input (nothing written),
//! 3 numerical or I/O failure.

mod config;
mod output;
mod plot;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::output::{sha256_hex, write_atomic, Manifest, OutputError, Timings, Versions};
use crate::run::RunError;

/// Output directory override, below `--output` and above the config's `output_dir`.
const OUTPUT_ENV: &str = "WHQ_OUTPUT_DIR";
const DEFAULT_OUTPUT: &str = "whq-out";

#[derive(Parser, Debug)]
#[command(name = "whq", version, about = "Covariant integral quantization experiments")]
struct Cli {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the environment and the config.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Accepted for compatibility; every run is deterministic.
    #[arg(long)]
    seedless: bool,
    /// Only errors on stderr.
    #[arg(long)]
    quiet: bool,
}

fn output_dir(cli: &Cli, cfg: &config::LoadedConfig) -> PathBuf {
    if let Some(p) = &cli.output {
        return p.clone();
    }
    if let Some(p) = std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    match &cfg.config.output_dir {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => cfg.base_dir.join(p),
        None => PathBuf::from(DEFAULT_OUTPUT),
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn write_all(dir: &std::path::Path, artifacts: &run::Artifacts) -> Result<Vec<String>, OutputError> {
    std::fs::create_dir_all(dir).map_err(|source| OutputError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    // render everything first so a bad table leaves no partial output
    let mut files = Vec::new();
    for t in &artifacts.tables {
        files.push((format!("{}.csv", t.name), t.to_csv()?));
    }
    for (name, svg) in &artifacts.plots {
        files.push((name.clone(), svg.clone()));
    }
    for (name, body) in &files {
        write_atomic(&dir.join(name), body.as_bytes())?;
    }
    Ok(files.into_iter().map(|(n, _)| n).collect())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let t0 = Instant::now();
    let cfg = match config::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            log::error!("{e}");
            return ExitCode::from(2);
        }
    };
    let parse_ms = ms(t0);

    let t1 = Instant::now();
    let artifacts = match run::run(&cfg) {
        Ok(a) => a,
        Err(e @ RunError::Invalid(_)) => {
            log::error!("{e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            log::error!("{}: {e}", cfg.config.command.name());
            return ExitCode::from(3);
        }
    };
    let compute_ms = ms(t1);
    for w in &artifacts.warnings {
        log::warn!("{w}");
    }

    let t2 = Instant::now();
    let dir = output_dir(&cli, &cfg);
    let names = match write_all(&dir, &artifacts) {
        Ok(n) => n,
        Err(e) => {
            log::error!("{e}");
            return ExitCode::from(3);
        }
    };
    let manifest = Manifest {
        command: cfg.config.command.name().to_string(),
        config_sha256: sha256_hex(cfg.raw.as_bytes()),
        versions: Versions {
            whq: env!("CARGO_PKG_VERSION"),
            wh_quant: wh_quant_version(),
        },
        timings: Timings {
            parse_ms,
            compute_ms,
            write_ms: ms(t2),
        },
        warnings: artifacts.warnings.clone(),
        artifacts: names,
        summary: artifacts.summary.clone(),
    };
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    if let Err(e) = write_atomic(&dir.join("manifest.json"), body.as_bytes()) {
        log::error!("{e}");
        return ExitCode::from(3);
    }
    log::info!("{} artifacts written to {}", manifest.artifacts.len() + 1, dir.display());
    ExitCode::SUCCESS
}

fn wh_quant_version() -> &'static str {
    // both crates are versioned together in this workspace
    env!("CARGO_PKG_VERSION")
}
