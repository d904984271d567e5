use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use radflow::config::{FaultInjection, RunConfig};
use radflow::io;
use radflow::pipeline::{
    allowances, build_grid, completion_checks, diagnose, inject_fault, run_evolution,
    write_artifacts,
};
use radflow::presets::{run_crosscheck, CrosscheckSpec};
use radflow::{run_preset, run_sweep, PresetOptions, Report, SweepSpec, PRESETS};

#[derive(Parser)]
#[command(
    name = "radflow",
    version,
    about = "Rotationally symmetric Ricci flow experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration; the default run when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomised property checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured initial data and write the trajectory.
    Evolve,
    /// Evolve (or read a trajectory) and run every bound check.
    Diagnose {
        /// Diagnose this trajectory.csv instead of evolving.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Run a named experiment.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        name: String,
        /// Test mode: corrupt the stored trajectory by this amount before checking.
        #[arg(long)]
        inject_fault: Option<f64>,
    },
    /// Run a parameter sweep over bump amplitude and dimension.
    Sweep,
    /// Compare the radial solver with the 3-D solver.
    Crosscheck,
    /// Weighted-norm, mollifier and spot-value audit.
    NormAudit,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = Some(o.clone());
    }
    Ok(cfg)
}

fn load_json<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn summarise(report: &Report) {
    for c in &report.checks {
        let tag = if c.passed { "pass" } else { "FAIL" };
        println!(
            "{tag}  {:<40} margin {:>12.4e}  allowance {:.3e}",
            c.name, c.margin, c.allowance
        );
    }
    for e in &report.errors {
        println!("error {e}");
    }
    println!(
        "{}: {}",
        report.name,
        if report.passed { "passed" } else { "FAILED" }
    );
}

fn evolve_cmd(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli)?;
    let traj = run_evolution(&cfg)?;
    let mut report = Report::new("evolve");
    report.extend(completion_checks(&traj, cfg.solver.f_cap));
    report.log("steps", traj.steps);
    report.log("events", &traj.events);
    write_artifacts(&out_dir(&cfg), &cfg, &traj, None, &report)?;
    summarise(&report);
    Ok(report.exit_code())
}

fn diagnose_cmd(cli: &Cli, trajectory: Option<&Path>) -> Result<i32> {
    let mut cfg = load_config(cli)?;
    let mut traj = match trajectory {
        Some(p) => io::read_trajectory(p, &build_grid(&cfg.grid)?, cfg.profile.dimension())?,
        None => run_evolution(&cfg)?,
    };
    let eps = allowances(&cfg, &traj)?;
    if let Some(f) = cfg.fault {
        inject_fault(&mut traj, f)?;
    }
    let d = diagnose(&cfg, &traj, eps)?;
    cfg.preset = None;
    write_artifacts(&out_dir(&cfg), &cfg, &traj, Some(&d), &d.report)?;
    summarise(&d.report);
    Ok(d.report.exit_code())
}

fn write_report(dir: &Path, report: &impl serde::Serialize) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    io::write_json(dir, io::REPORT_JSON, report)
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Evolve => evolve_cmd(cli),
        Command::Diagnose { trajectory } => diagnose_cmd(cli, trajectory.as_deref()),
        Command::Preset { name, inject_fault } => {
            let opts = PresetOptions {
                out: cli.out.clone(),
                seed: cli.seed.unwrap_or(0),
                fault: inject_fault.map(|delta_f| FaultInjection { delta_f }),
            };
            let report = run_preset(name, &opts)?;
            summarise(&report);
            Ok(report.exit_code())
        }
        Command::Sweep => {
            let spec: SweepSpec = load_json(cli.config.as_deref())?;
            let threads = cli
                .threads
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let report = run_sweep(&spec, threads)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            write_report(&dir, &report)?;
            radflow::sweep::write_sweep_csv(&dir, &report)?;
            for c in &report.cells {
                println!("A={:<6} n={}  {:?}", c.amplitude, c.dimension, c.status);
            }
            Ok(report.exit_code())
        }
        Command::Crosscheck => {
            let spec: CrosscheckSpec = load_json(cli.config.as_deref())?;
            let report = run_crosscheck(&spec)?;
            if let Some(dir) = &cli.out {
                write_report(dir, &report)?;
            }
            summarise(&report);
            Ok(report.exit_code())
        }
        Command::NormAudit => {
            let opts = PresetOptions {
                out: cli.out.clone(),
                seed: cli.seed.unwrap_or(0),
                fault: None,
            };
            let report = run_preset("norm-audit", &opts)?;
            summarise(&report);
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
