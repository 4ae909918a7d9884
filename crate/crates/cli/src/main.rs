//! `syzq`: batch front-end that runs the abelian, toric and semi-flat
//! demo pipelines and writes JSON reports plus CSV grids.

mod config;
mod pipeline;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use syzq_core::numerics::NumericsConfig;

use config::{Mode, Overrides, RunConfig};
use pipeline::PipelineError;
use report::{sha256_hex, VerificationReport};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "syzq", version, about = "Verify mirror-symmetric quantization pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the `out` entry of the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    truncation: Option<i64>,
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long = "fd-step", global = true)]
    fd_step: Option<f64>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    parallel: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Theta functions of a polarized abelian datum.
    Abelian,
    /// Bohr-Sommerfeld fibers and characters of a toric datum.
    Toric,
    /// Semi-flat transform of Gaussians on the line.
    Demo,
}

impl Command {
    fn mode(self) -> Mode {
        match self {
            Command::Abelian => Mode::Abelian,
            Command::Toric => Mode::Toric,
            Command::Demo => Mode::SemiflatDemo,
        }
    }
}

fn load_config(path: Option<&Path>, mode: Mode) -> Result<RunConfig, String> {
    let config: RunConfig = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", p.display()))?
        }
        None if mode == Mode::SemiflatDemo => serde_json::from_str("{}").expect("empty config parses"),
        None => return Err("--config is required".into()),
    };
    match config.mode {
        Some(m) if m != mode => Err(format!(
            "config mode {} does not match subcommand {}",
            m.name(),
            mode.name()
        )),
        _ => Ok(config),
    }
}

fn write_report(dir: &Path, report: &VerificationReport) -> Result<(), String> {
    let path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report).map_err(|e| e.to_string())?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn invalid_report(mode: Mode, kind: &str, message: String, check: &str) -> VerificationReport {
    let mut report = VerificationReport::new(mode.name(), String::new(), &NumericsConfig::default());
    report.fail_with(check, kind, message);
    report.finish();
    report
}

fn run(cli: Cli) -> u8 {
    let mode = cli.command.mode();
    let mut config = match load_config(cli.config.as_deref(), mode) {
        Ok(c) => c,
        Err(message) => {
            eprintln!("syzq: {message}");
            if let Some(dir) = &cli.out {
                let report = invalid_report(mode, "InvalidConfig", message, "config");
                if std::fs::create_dir_all(dir).is_ok() {
                    let _ = write_report(dir, &report);
                }
            }
            return EXIT_INVALID_INPUT;
        }
    };
    let Some(dir) = cli.out.clone().or_else(|| config.out.clone()) else {
        eprintln!("syzq: no output directory (pass --out or set `out` in the config)");
        return EXIT_INVALID_INPUT;
    };
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("syzq: cannot create {}: {e}", dir.display());
        return EXIT_INVALID_INPUT;
    }

    Overrides {
        truncation: cli.truncation,
        grid: cli.grid,
        fd_step: cli.fd_step,
        hbar: cli.hbar,
        seed: cli.seed,
    }
    .apply(&mut config.numerics);
    config.mode = Some(mode);
    config.parallel = cli.parallel.or(config.parallel);
    if let Err(e) = config.numerics.validate() {
        eprintln!("syzq: {e}");
        let _ = write_report(
            &dir,
            &invalid_report(mode, "InvalidNumerics", e.to_string(), "numerics"),
        );
        return EXIT_INVALID_INPUT;
    }
    if let Some(n) = config.parallel {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("syzq: cannot size thread pool: {e}");
        }
    }

    // The output location is not part of what the run computes.
    let effective = RunConfig {
        out: None,
        ..config.clone()
    };
    let hash = sha256_hex(&serde_json::to_vec(&effective).expect("config serializes"));
    let mut report = VerificationReport::new(mode.name(), hash, &config.numerics);
    let outcome = match mode {
        Mode::Abelian => pipeline::run_abelian(&config, &dir, &mut report),
        Mode::Toric => pipeline::run_toric(&config, &dir, &mut report),
        Mode::SemiflatDemo => pipeline::run_demo(&config, &dir, &mut report),
    };
    let mut code = match outcome {
        Ok(()) => 0,
        Err(PipelineError::Invalid { kind, message, check }) => {
            eprintln!("syzq: invalid input at {check}: {message}");
            report.fail_with(&check, &kind, message);
            EXIT_INVALID_INPUT
        }
        Err(PipelineError::Check { kind, message, check }) => {
            eprintln!("syzq: {check} failed: {message}");
            report.fail_with(&check, &kind, message);
            EXIT_CHECK_FAILED
        }
        Err(e @ PipelineError::Io { .. }) => {
            eprintln!("syzq: {e}");
            report.fail_with("output", "Io", e.to_string());
            EXIT_INVALID_INPUT
        }
    };
    report.finish();
    if code == 0 && !report.summary.pass {
        code = EXIT_CHECK_FAILED;
    }
    if config.emit.report {
        if let Err(e) = write_report(&dir, &report) {
            eprintln!("syzq: {e}");
            return EXIT_INVALID_INPUT;
        }
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("syzq: check {} failed ({:e} vs {:e})", c.name, c.value, c.tolerance);
    }
    code
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
