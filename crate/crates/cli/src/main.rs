//! `vlcris`: run, validate and grid-check scenario files.
//!
//! Exit codes: 0 on success, 1 when the configuration is invalid, 2 when a run fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vlcris_core::scenario::{
    emit_csv, emit_trace_csv, load_config, run_with, RunReport, ScenarioConfig, ScenarioKind,
    Solver,
};
use vlcris_core::Error;

/// Replaces the directory of every output file.
const OUT_DIR_ENV: &str = "VLCRIS_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "vlcris", version, about = "Mirror-array and LC receiver VLC experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario with the sine-cosine optimizer.
    Run(RunArgs),
    /// Solve the scenario's problem by exhaustive grid search.
    Oracle(RunArgs),
    /// Check a scenario file and print its resolved settings.
    Validate { config: PathBuf },
}

#[derive(Debug, Args)]
struct RunArgs {
    config: PathBuf,
    /// Master seed for scene sampling and the optimizer.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte-Carlo trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,
    /// Output CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a wall_ms column.
    #[arg(long)]
    timing: bool,
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Runtime(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(&args, Solver::Sca),
        Command::Oracle(args) => run(&args, Solver::Grid),
        Command::Validate { config } => validate(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(e) | Failure::Runtime(e)) = &f;
            eprintln!("error: {e}");
            ExitCode::from(f.code())
        }
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    load_config(path).map_err(Failure::Config)
}

fn validate(path: &Path) -> Result<(), Failure> {
    let cfg = load(path)?;
    println!("{}: ok", path.display());
    println!("  kind          {}", cfg.kind.name());
    if cfg.problem != cfg.kind {
        println!("  problem       {}", cfg.problem.name());
    }
    println!("  los           {:?}", cfg.los_mode);
    println!("  users         {}", cfg.scene.users.len());
    println!(
        "  mirrors       {} ({} x {})",
        cfg.scene.mirror_array.count(),
        cfg.scene.mirror_array.rows,
        cfg.scene.mirror_array.cols
    );
    println!("  E field       {:.4e} V/m", cfg.params.electric_field());
    match &cfg.sweep {
        Some(s) => println!("  sweep         {} x {}", s.variable.name(), s.values.len()),
        None => println!("  sweep         none"),
    }
    println!(
        "  trials        {} (seed {}, randomize {})",
        cfg.monte_carlo.trials, cfg.monte_carlo.seed, cfg.monte_carlo.randomize
    );
    println!(
        "  optimizer     N = {}, T = {}, a = {} (seed {})",
        cfg.optimizer.sca.agents, cfg.optimizer.sca.iterations, cfg.optimizer.sca.a, cfg.optimizer.seed
    );
    Ok(())
}

fn output_path(cfg: &ScenarioConfig, args: &RunArgs, solver: Solver) -> PathBuf {
    if let Some(out) = &args.out {
        return out.clone();
    }
    let env_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let path = cfg.output_path(env_dir.as_deref());
    if solver == Solver::Grid && cfg.kind != ScenarioKind::OracleGrid {
        let stem = path.file_stem().unwrap_or_default().to_string_lossy();
        return path.with_file_name(format!("{stem}_oracle.csv"));
    }
    path
}

fn run(args: &RunArgs, solver: Solver) -> Result<(), Failure> {
    let mut cfg = load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.monte_carlo.seed = seed;
        cfg.optimizer.seed = seed;
    }
    if let Some(trials) = args.trials {
        if trials == 0 {
            return Err(Failure::Config(Error::Validation {
                field: "--trials".into(),
                reason: "must be at least 1".into(),
            }));
        }
        cfg.monte_carlo.trials = trials;
    }
    let path = output_path(&cfg, args, solver);
    let report = run_with(&cfg, solver).map_err(|e| {
        if e.is_validation() {
            Failure::Config(e)
        } else {
            Failure::Runtime(e)
        }
    })?;
    write(&cfg, &report, &path, args.timing, solver).map_err(Failure::Runtime)?;
    summarize(&report);
    println!("wrote {}", path.display());
    Ok(())
}

fn write(cfg: &ScenarioConfig, report: &RunReport, path: &Path, timing: bool, solver: Solver) -> vlcris_core::Result<()> {
    if cfg.kind == ScenarioKind::ConvergenceTrace && solver == Solver::Sca {
        emit_trace_csv(&report.traces, path)
    } else {
        emit_csv(&report.rows, path, timing)
    }
}

fn summarize(report: &RunReport) {
    for r in &report.rows {
        let failed = if r.failed_trials > 0 {
            format!(" ({} failed)", r.failed_trials)
        } else {
            String::new()
        };
        println!(
            "{:>16} = {:<12.5e} mean {:.5e}  min {:.5e}  max {:.5e}{failed}",
            r.sweep_variable, r.sweep_value, r.mean, r.min, r.max
        );
    }
}
