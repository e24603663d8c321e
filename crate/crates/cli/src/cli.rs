//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand, ValueEnum};

use qgrape_core::oracles::{
    best_pulse_time, parallel_free_qfi, parallel_single_pulse_qfi, spontaneous_free_qfi,
    spontaneous_single_pulse_qfi, transverse_controlled_qfi, SinglePulsePlan,
};

use crate::config::ScenarioConfig;
use crate::format::{energy_csv, fmt_sig, read_schedule, schedule_csv, write_file};
use crate::runs::{
    energy_cost, history_csv, manifest_head, run_optimize, run_sweep, simulate, trajectory_csv,
    PULSE_SCAN_POINTS,
};
use crate::CliError;

const DEFAULT_OUT: &str = "qgrape-out";

#[derive(Debug, Parser)]
#[command(name = "qgrape", version, about = "Fisher-information pulse optimization for a driven, dissipative qubit")]
pub struct Cli {
    /// Scenario config file (`key = value` lines).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Overrides `ascent.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `workers`.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Overrides `dt`.
    #[arg(long, global = true, value_name = "X")]
    pub dt: Option<f64>,
    /// Progress on stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate a fixed schedule (zero controls by default) at ω₀_true.
    Simulate {
        #[arg(long, value_name = "PATH")]
        schedule: Option<PathBuf>,
    },
    /// Run gradient ascent at ω̂₀ and evaluate at ω₀_true.
    Optimize,
    /// Run the sweep named by `sweep.axis`.
    Sweep,
    /// Evaluate a closed-form reference.
    Oracle(OracleArgs),
    /// Control energy E(t) of a schedule file.
    Energy {
        #[arg(long, value_name = "PATH")]
        schedule: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleKind {
    /// Transverse dephasing with the frequency cancelled by controls.
    Transverse,
    /// Free evolution under parallel dephasing.
    ParallelFree,
    /// One π/2 pulse at t0 under parallel dephasing.
    ParallelPulse,
    /// Free evolution under spontaneous emission.
    SpontaneousFree,
    /// One rotation at t0 under spontaneous emission.
    SpontaneousPulse,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub kind: OracleKind,
    /// Dephasing rate, or the decay rate γ₋ for spontaneous emission.
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    /// Excitation rate γ₊.
    #[arg(long, default_value_t = 0.0)]
    pub gamma_plus: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    /// Design frequency of the spontaneous-emission pulse (defaults to omega0).
    #[arg(long)]
    pub omega_bar: Option<f64>,
    #[arg(long)]
    pub horizon: f64,
    /// Pulse time; without it the best of a uniform scan is reported.
    #[arg(long)]
    pub t0: Option<f64>,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Input("this command needs --config PATH".into()))?;
    let mut config = ScenarioConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.ascent.seed = seed;
    }
    if let Some(w) = cli.workers {
        config.workers = w;
    }
    if let Some(dt) = cli.dt {
        config.dt = dt;
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate { schedule } => cmd_simulate(cli, schedule.as_deref()),
        Command::Optimize => cmd_optimize(cli),
        Command::Sweep => cmd_sweep(cli),
        Command::Oracle(args) => {
            println!("{}", oracle_text(args)?);
            Ok(())
        }
        Command::Energy { schedule } => cmd_energy(cli, schedule),
    }
}

fn cmd_simulate(cli: &Cli, schedule: Option<&Path>) -> Result<(), CliError> {
    let (started, clock) = (SystemTime::now(), Instant::now());
    let config = load_config(cli)?;
    let grid = schedule.map(|p| read_schedule(p, Some(config.dt))).transpose()?;
    let sim = simulate(&config, grid.as_ref())?;
    let dir = out_dir(cli);
    write_file(&dir.join("trajectory.csv"), &trajectory_csv(&sim))?;
    let mut manifest = manifest_head(config.ascent.seed, config.workers, started, clock.elapsed());
    manifest.push_str("files:\n  trajectory.csv\n");
    if let Some(p) = schedule {
        manifest.push_str(&format!("schedule: {}\n", p.display()));
    }
    if let Some(n) = &sim.cfi_note {
        manifest.push_str(&format!("notes:\n  {n}\n"));
    }
    manifest.push_str("config:\n");
    manifest.push_str(&config.snapshot());
    write_file(&dir.join("manifest.txt"), &manifest)?;
    println!("qfi = {}", fmt_sig(sim.qfi, 12));
    println!("cfi = {}", fmt_sig(sim.cfi, 12));
    Ok(())
}

fn cmd_optimize(cli: &Cli) -> Result<(), CliError> {
    let config = load_config(cli)?;
    let out = run_optimize(&config)?;
    let report = &out.report;
    let dir = out_dir(cli);
    let mut files = out.record.write(&dir)?;
    files.pop(); // manifest, rewritten below with the extra files
    for (name, text) in [
        ("schedule.csv", schedule_csv(&report.final_grid)),
        ("history.csv", history_csv(report)),
        ("energy.csv", energy_csv(&energy_cost(&report.final_grid))),
    ] {
        let path = dir.join(name);
        write_file(&path, &text)?;
        files.push(path);
    }
    write_file(&dir.join("manifest.txt"), &out.record.manifest(&dir, &files))?;
    if cli.verbose {
        eprintln!("{} iterations, converged: {}", report.iterations_used, report.converged);
    }
    let p = &out.record.tables[0].points[0];
    println!("qfi = {}", fmt_sig(p.qfi, 12));
    println!("cfi = {}", fmt_sig(p.cfi, 12));
    println!("uncontrolled_qfi = {}", fmt_sig(p.uncontrolled_qfi, 12));
    println!("status = {}", p.status.as_str());
    match &report.error {
        Some(e) => Err(e.clone().into()),
        None => Ok(()),
    }
}

fn cmd_sweep(cli: &Cli) -> Result<(), CliError> {
    let config = load_config(cli)?;
    let record = run_sweep(&config, cli.verbose)?;
    let dir = out_dir(cli);
    let files = record.write(&dir)?;
    let total = record.points().count();
    let failed = record.failed_points();
    println!("{} points, {} failed, {} files in {}", total, failed, files.len(), dir.display());
    if failed > 0 && failed == total {
        return Err(CliError::Numerical(qgrape_core::Error::NumericalStability {
            step: 0,
            detail: "every sweep point failed; see manifest.txt".into(),
        }));
    }
    Ok(())
}

fn cmd_energy(cli: &Cli, schedule: &Path) -> Result<(), CliError> {
    let grid = read_schedule(schedule, cli.dt)?;
    let text = energy_csv(&energy_cost(&grid));
    match &cli.out {
        Some(dir) => write_file(&dir.join("energy.csv"), &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// The oracle value with 6 significant digits, followed by the best pulse
/// time when it was scanned.
pub fn oracle_text(args: &OracleArgs) -> Result<String, CliError> {
    let (g, t) = (args.gamma, args.horizon);
    let six = |v: f64| fmt_sig(v, 6);
    let pulse = |f: &dyn Fn(f64) -> qgrape_core::Result<f64>| -> Result<String, CliError> {
        match args.t0 {
            Some(t0) => Ok(six(f(t0)?)),
            None => {
                let (t0, v) = best_pulse_time(t, PULSE_SCAN_POINTS, |x| f(x))?;
                Ok(format!("{} at t0 = {}", six(v), six(t0)))
            }
        }
    };
    let spontaneous_plan = |t0: f64| SinglePulsePlan {
        t0,
        horizon: t,
        omega0: args.omega0,
        omega_bar: args.omega_bar.unwrap_or(args.omega0),
        gamma: g,
        gamma_plus: args.gamma_plus,
    };
    match args.kind {
        OracleKind::Transverse => Ok(six(transverse_controlled_qfi(g, t)?)),
        OracleKind::ParallelFree => Ok(six(parallel_free_qfi(g, t)?)),
        OracleKind::SpontaneousFree => Ok(six(spontaneous_free_qfi(args.gamma_plus, g, t)?)),
        OracleKind::ParallelPulse => {
            pulse(&|t0| parallel_single_pulse_qfi(&SinglePulsePlan::parallel(g, args.omega0, t0, t)))
        }
        OracleKind::SpontaneousPulse => pulse(&|t0| spontaneous_single_pulse_qfi(&spontaneous_plan(t0))),
    }
}
