use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use whichway::config::RunConfig;
use whichway::error::{AppError, Result};
use whichway::format::to_json_string;
use whichway::output::{write_atomic, write_run};
use whichway::report::execute;
use whichway::sweep::{sweep, sweep_csv, SweepParam};
use whichway_core::frame::{check_theorem_with, SampleOptions};
use whichway_core::scenario::fringe_map;

#[derive(Parser, Debug)]
#[command(name = "whichway", version, about = "Two-slit interference and which-way information scenarios")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and write its output directory
    Run {
        config: PathBuf,
        /// Output directory (overrides `output_dir` in the config)
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Re-run a scenario for each value of one parameter
    Sweep {
        config: PathBuf,
        /// wire_width_fraction, wire_count, time, amplitude_ratio or lens_aperture
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Sample random frame instances and check the overlap identity
    CheckTheorem {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw complex c1, c2 as well
        #[arg(long)]
        complex: bool,
    },
    /// Print the dark-fringe map of a scenario's interference region
    FringeMap { config: PathBuf },
}

fn output_dir(cfg: &RunConfig, out: Option<PathBuf>, suffix: &str) -> Result<PathBuf> {
    let mut cfg = cfg.clone();
    if out.is_some() {
        cfg.output_dir = out;
    }
    let hash = whichway::report::parameter_hash(&cfg)?;
    let kind = serde_json::to_value(cfg.scenario.kind)?;
    let name = format!("{}{}-{}", kind.as_str().unwrap_or("run"), suffix, &hash[..12]);
    Ok(cfg.resolve_output_dir(&name))
}

fn run(config: &Path, out: Option<PathBuf>) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    cfg.validate()?;
    let dir = output_dir(&cfg, out, "")?;
    let done = execute(&cfg)?;
    let path = write_run(&dir, &done)?;
    println!("{}", path.display());
    Ok(())
}

fn run_sweep(config: &Path, param: SweepParam, values: &[f64], out: Option<PathBuf>) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    cfg.validate()?;
    let dir = output_dir(&cfg, out, &format!("-sweep-{param}"))?;
    let entries = sweep(&cfg, param, values);
    write_atomic(&dir.join("sweep.json"), to_json_string(&entries)?.as_bytes())?;
    let csv_path = dir.join("sweep.csv");
    write_atomic(&csv_path, &sweep_csv(&entries)?)?;
    for e in entries.iter().filter(|e| e.error.is_some()) {
        eprintln!("{param}={}: {}", e.value, e.error.as_deref().unwrap_or_default());
    }
    println!("{}", csv_path.display());
    Ok(())
}

fn check_theorem(trials: u64, dim: usize, seed: u64, complex: bool) -> Result<()> {
    let opts = SampleOptions {
        complex_coefficients: complex,
    };
    let report = check_theorem_with(trials, dim, seed, opts).map_err(AppError::from_core)?;
    print!("{}", to_json_string(&report)?);
    if report.passed {
        Ok(())
    } else {
        Err(AppError::TheoremViolated {
            violations: report.violations,
            trials: report.trials,
        })
    }
}

fn print_fringe_map(config: &Path) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    cfg.validate()?;
    let map = fringe_map(&cfg.scenario).map_err(AppError::from_core)?;
    print!("{}", to_json_string(&map)?);
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Run { config, out } => run(&config, out),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => run_sweep(&config, param, &values, out),
        Command::CheckTheorem {
            trials,
            dim,
            seed,
            complex,
        } => check_theorem(trials, dim, seed, complex),
        Command::FringeMap { config } => print_fringe_map(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
