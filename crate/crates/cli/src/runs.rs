//! Scenario runners. Each sweep point is computed independently, possibly
//! on a worker thread, and results are collected in grid order so the
//! output does not depend on scheduling.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use qgrape_core::dynamics::bloch_from_density;
use qgrape_core::fisher::qfi;
use qgrape_core::oracles::{
    best_pulse_time, parallel_free_qfi, parallel_single_pulse_qfi, spontaneous_free_qfi,
    spontaneous_single_pulse_qfi, transverse_controlled_qfi, SinglePulsePlan,
};
use qgrape_core::{
    ascend, propagate, AscentReport, ControlGrid, DensityState, EstimationProblem, NoiseModel, Objective,
};

use crate::config::{
    InitKind, NoiseKind, ProbeSpec, PulseModel, ScenarioConfig, SweepAxis, SweepSpec,
};
use crate::format::{csv, fmt_sig, read_schedule, schedule_csv, write_file, TABLE_DIGITS};
use crate::CliError;

/// Pulse times tried when a single-pulse oracle is maximized over `t₀`.
pub const PULSE_SCAN_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Optimizer converged, or no optimization was needed.
    Ok,
    /// Iteration budget used up before convergence.
    MaxIterations,
    /// The point could not be completed; see the manifest for why.
    Failed,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::MaxIterations => "max_iterations",
            Status::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub axis: f64,
    pub horizon: f64,
    pub qfi: f64,
    pub cfi: f64,
    pub oracle_qfi: f64,
    pub uncontrolled_qfi: f64,
    pub status: Status,
    pub schedule: Option<ControlGrid>,
    pub note: Option<String>,
}

impl PointResult {
    fn blank(axis: f64, horizon: f64) -> Self {
        Self {
            axis,
            horizon,
            qfi: f64::NAN,
            cfi: f64::NAN,
            oracle_qfi: f64::NAN,
            uncontrolled_qfi: f64::NAN,
            status: Status::Ok,
            schedule: None,
            note: None,
        }
    }

    fn fail(&mut self, note: impl Into<String>) {
        self.status = Status::Failed;
        self.add_note(note);
    }

    fn add_note(&mut self, note: impl Into<String>) {
        let note = note.into();
        self.note = Some(match self.note.take() {
            Some(old) => format!("{old}; {note}"),
            None => note,
        });
    }

    pub fn qfi_per_t(&self) -> f64 {
        if self.horizon > 0.0 {
            self.qfi / self.horizon
        } else {
            f64::NAN
        }
    }

    pub fn qfi_per_t2(&self) -> f64 {
        if self.horizon > 0.0 {
            self.qfi / (self.horizon * self.horizon)
        } else {
            f64::NAN
        }
    }
}

pub const METRIC_COLUMNS: [&str; 7] = [
    "qfi",
    "qfi_per_t",
    "qfi_per_t2",
    "cfi",
    "oracle_qfi",
    "uncontrolled_qfi",
    "status",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// File stem of the CSV.
    pub name: String,
    pub axis: SweepAxis,
    pub points: Vec<PointResult>,
}

impl SweepTable {
    pub fn header(&self) -> Vec<String> {
        std::iter::once(self.axis.name())
            .chain(METRIC_COLUMNS)
            .map(String::from)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let f = |x: f64| fmt_sig(x, TABLE_DIGITS);
        let rows: Vec<Vec<String>> = self
            .points
            .iter()
            .map(|p| {
                vec![
                    f(p.axis),
                    f(p.qfi),
                    f(p.qfi_per_t()),
                    f(p.qfi_per_t2()),
                    f(p.cfi),
                    f(p.oracle_qfi),
                    f(p.uncontrolled_qfi),
                    p.status.as_str().to_string(),
                ]
            })
            .collect();
        csv(&self.header(), &rows)
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub snapshot: String,
    pub seed: u64,
    pub workers: usize,
    pub tables: Vec<SweepTable>,
    pub started: SystemTime,
    pub wall_clock: Duration,
}

impl RunRecord {
    fn new(config: &ScenarioConfig, started: SystemTime, clock: Instant, tables: Vec<SweepTable>) -> Self {
        Self {
            snapshot: config.snapshot(),
            seed: config.ascent.seed,
            workers: config.workers,
            tables,
            started,
            wall_clock: clock.elapsed(),
        }
    }

    pub fn failed_points(&self) -> usize {
        self.points().filter(|p| p.status == Status::Failed).count()
    }

    pub fn points(&self) -> impl Iterator<Item = &PointResult> {
        self.tables.iter().flat_map(|t| &t.points)
    }

    /// Writes every table, the optimized schedules and `manifest.txt`;
    /// returns the files written, manifest last.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let mut files = Vec::new();
        for table in &self.tables {
            let path = dir.join(format!("{}.csv", table.name));
            write_file(&path, &table.to_csv())?;
            files.push(path);
            for (i, p) in table.points.iter().enumerate() {
                if let Some(grid) = &p.schedule {
                    let path = dir.join("schedules").join(format!("{}_{i:03}.csv", table.name));
                    write_file(&path, &schedule_csv(grid))?;
                    files.push(path);
                }
            }
        }
        let path = dir.join("manifest.txt");
        write_file(&path, &self.manifest(dir, &files))?;
        files.push(path);
        Ok(files)
    }

    pub fn manifest(&self, dir: &Path, files: &[PathBuf]) -> String {
        let mut out = manifest_head(self.seed, self.workers, self.started, self.wall_clock);
        out.push_str("files:\n");
        for f in files {
            let rel = f.strip_prefix(dir).unwrap_or(f);
            out.push_str(&format!("  {}\n", rel.display()));
        }
        let notes: Vec<String> = self
            .tables
            .iter()
            .flat_map(|t| {
                t.points.iter().filter_map(move |p| {
                    p.note
                        .as_ref()
                        .map(|n| format!("  {} {} = {}: {n}", t.name, t.axis.name(), fmt_sig(p.axis, TABLE_DIGITS)))
                })
            })
            .collect();
        if !notes.is_empty() {
            out.push_str("notes:\n");
            for n in notes {
                out.push_str(&n);
                out.push('\n');
            }
        }
        out.push_str("config:\n");
        out.push_str(&self.snapshot);
        out
    }
}

pub fn manifest_head(seed: u64, workers: usize, started: SystemTime, wall_clock: Duration) -> String {
    let unix = started.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!(
        "qgrape {}\nseed = {seed}\nworkers = {workers}\nstarted_unix = {unix}\nwall_clock_seconds = {:.3}\n",
        env!("CARGO_PKG_VERSION"),
        wall_clock.as_secs_f64()
    )
}

/// Counts finished points for `--verbose`.
struct Progress {
    total: usize,
    done: AtomicUsize,
    verbose: bool,
}

impl Progress {
    fn new(total: usize, verbose: bool) -> Self {
        Self {
            total,
            done: AtomicUsize::new(0),
            verbose,
        }
    }

    fn tick(&self, label: &str, p: &PointResult) {
        let n = self.done.fetch_add(1, Ordering::Relaxed) + 1;
        if self.verbose {
            eprintln!(
                "[{n}/{}] {label} = {}: qfi {} ({})",
                self.total,
                fmt_sig(p.axis, 6),
                fmt_sig(p.qfi, 6),
                p.status.as_str()
            );
        }
    }
}

fn par_map<T: Sync, R: Send>(workers: usize, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Result<Vec<R>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

fn sweep_of(config: &ScenarioConfig, axis: SweepAxis) -> Result<&SweepSpec, CliError> {
    match &config.sweep {
        Some(s) if s.axis == axis => Ok(s),
        Some(s) => Err(CliError::Input(format!(
            "expected sweep.axis = {}, found {}",
            axis.name(),
            s.axis.name()
        ))),
        None => Err(CliError::Input(format!("sweep.axis = {} is required", axis.name()))),
    }
}

fn initial_schedule(config: &ScenarioConfig) -> Result<Option<ControlGrid>, CliError> {
    match (&config.ascent.init, &config.ascent.schedule) {
        (InitKind::Schedule, Some(path)) => Ok(Some(read_schedule(path, Some(config.dt))?)),
        _ => Ok(None),
    }
}

/// Runs the ascent for a design problem.
pub fn optimize(
    config: &ScenarioConfig,
    design: &EstimationProblem,
    schedule: Option<&ControlGrid>,
) -> Result<AscentReport, CliError> {
    let ascent = config.ascent_config(design.parameter, schedule.cloned());
    Ok(ascend(design, &ascent, &config.objective())?)
}

/// QFI and CFI (with the configured POVM) of `grid` on `problem`. A CFI
/// that cannot be computed becomes `nan` with an explanation.
pub fn evaluate_controls(
    config: &ScenarioConfig,
    problem: &EstimationProblem,
    grid: &ControlGrid,
) -> Result<(f64, f64, Option<String>), CliError> {
    let traj = propagate(problem, grid)?;
    let q = Objective::Qfi.evaluate(&traj)?;
    match Objective::Cfi(config.povm.povm()).evaluate(&traj) {
        Ok(f) => Ok((q, f, None)),
        Err(e) => Ok((q, f64::NAN, Some(format!("cfi undefined: {e}")))),
    }
}

pub fn uncontrolled_qfi(problem: &EstimationProblem, dt: f64) -> Result<f64, CliError> {
    let m = ControlGrid::steps_for(problem.horizon, dt)?;
    let traj = propagate(problem, &ControlGrid::zeros(m, problem.control_count(), dt)?)?;
    Ok(Objective::Qfi.evaluate(&traj)?)
}

/// Optimizes at `omega_hat` and evaluates at `omega_true`, both for the
/// given noise, probe and horizon.
#[allow(clippy::too_many_arguments)]
fn try_controlled_point(
    config: &ScenarioConfig,
    noise: NoiseModel,
    probe: &DensityState,
    horizon: f64,
    omega_hat: f64,
    omega_true: f64,
    schedule: Option<&ControlGrid>,
    axis: f64,
) -> Result<(PointResult, AscentReport), CliError> {
    let mut point = PointResult::blank(axis, horizon);
    let design = EstimationProblem::qubit(omega_hat, noise, probe.clone(), horizon)?;
    let truth = design.with_parameter(omega_true);
    point.uncontrolled_qfi = uncontrolled_qfi(&truth, config.dt)?;
    let report = optimize(config, &design, schedule)?;
    let (q, f, note) = evaluate_controls(config, &truth, &report.final_grid)?;
    point.qfi = q;
    point.cfi = f;
    if let Some(n) = note {
        point.add_note(n);
    }
    point.status = if let Some(e) = &report.error {
        point.add_note(format!("optimizer stopped early: {e}"));
        Status::Failed
    } else if report.converged {
        Status::Ok
    } else {
        Status::MaxIterations
    };
    point.schedule = Some(report.final_grid.clone());
    Ok((point, report))
}

/// As [`try_controlled_point`], with failures recorded in the point.
#[allow(clippy::too_many_arguments)]
fn controlled_point(
    config: &ScenarioConfig,
    noise: NoiseModel,
    probe: &DensityState,
    horizon: f64,
    omega_hat: f64,
    omega_true: f64,
    schedule: Option<&ControlGrid>,
    axis: f64,
) -> PointResult {
    try_controlled_point(config, noise, probe, horizon, omega_hat, omega_true, schedule, axis)
        .map(|(p, _)| p)
        .unwrap_or_else(|e| {
            let mut p = PointResult::blank(axis, horizon);
            p.fail(e.to_string());
            p
        })
}

fn require_values(config: &ScenarioConfig, axis: SweepAxis) -> Result<Vec<f64>, CliError> {
    Ok(sweep_of(config, axis)?.values.clone())
}

/// θ sweep of the dephasing axis for the probes `|+⟩` and `|0⟩`, with the
/// noiseless reference `T²` as oracle. The configured probe is not used.
pub fn run_theta_sweep(config: &ScenarioConfig, verbose: bool) -> Result<RunRecord, CliError> {
    let (started, clock) = (SystemTime::now(), Instant::now());
    let thetas = require_values(config, SweepAxis::Theta)?;
    if config.noise.kind != NoiseKind::Dephasing {
        return Err(CliError::Input("a theta sweep needs noise.kind = dephasing".into()));
    }
    ControlGrid::steps_for(config.horizon, config.dt)?;
    let schedule = initial_schedule(config)?;
    let probes = [("theta_plus", ProbeSpec::Plus), ("theta_zero", ProbeSpec::Zero)];
    let jobs: Vec<(usize, f64)> = (0..probes.len()).flat_map(|p| thetas.iter().map(move |t| (p, *t))).collect();
    let progress = Progress::new(jobs.len(), verbose);
    let results = par_map(config.workers, &jobs, |&(p, theta)| {
        let noise = NoiseModel::Dephasing {
            theta,
            phi: config.noise.phi,
            gamma: config.noise.gamma,
        };
        let mut point = controlled_point(
            config,
            noise,
            &probes[p].1.state(),
            config.horizon,
            config.omega_hat,
            config.omega_true,
            schedule.as_ref(),
            theta,
        );
        point.oracle_qfi = config.horizon * config.horizon;
        progress.tick(probes[p].0, &point);
        point
    })?;
    let mut results = results.into_iter();
    let tables = probes
        .iter()
        .map(|(name, _)| SweepTable {
            name: name.to_string(),
            axis: SweepAxis::Theta,
            points: results.by_ref().take(thetas.len()).collect(),
        })
        .collect();
    Ok(RunRecord::new(config, started, clock, tables))
}

/// The best available analytic reference for a horizon: the controlled
/// closed form (transverse), the best single pulse (parallel, spontaneous)
/// or `T²` without noise. Only defined for the `|+⟩` probe.
pub fn time_oracle(config: &ScenarioConfig, horizon: f64) -> Result<Option<f64>, CliError> {
    if config.probe != ProbeSpec::Plus {
        return Ok(None);
    }
    let n = &config.noise;
    let value = match n.kind {
        NoiseKind::None => Some(horizon * horizon),
        NoiseKind::Dephasing if n.is_transverse() => Some(transverse_controlled_qfi(n.gamma, horizon)?),
        NoiseKind::Dephasing if n.is_parallel() => Some(
            best_pulse_time(horizon, PULSE_SCAN_POINTS, |t0| {
                parallel_single_pulse_qfi(&SinglePulsePlan::parallel(n.gamma, config.omega_true, t0, horizon))
            })?
            .1,
        ),
        NoiseKind::Dephasing => None,
        NoiseKind::Spontaneous => Some(
            best_pulse_time(horizon, PULSE_SCAN_POINTS, |t0| {
                let plan = spontaneous_plan(config, t0, horizon);
                // A pulse time with no defined rotation is simply skipped.
                match spontaneous_single_pulse_qfi(&plan) {
                    Err(qgrape_core::Error::UndefinedRotation) => Ok(f64::NEG_INFINITY),
                    other => other,
                }
            })?
            .1,
        ),
    };
    Ok(value)
}

fn spontaneous_plan(config: &ScenarioConfig, t0: f64, horizon: f64) -> SinglePulsePlan {
    SinglePulsePlan {
        t0,
        horizon,
        omega0: config.omega_true,
        omega_bar: config.omega_hat,
        gamma: config.noise.gamma_minus,
        gamma_plus: config.noise.gamma_plus,
    }
}

/// Independent optimization at every horizon (no warm starts).
pub fn run_time_scan(config: &ScenarioConfig, verbose: bool) -> Result<RunRecord, CliError> {
    let (started, clock) = (SystemTime::now(), Instant::now());
    let horizons = require_values(config, SweepAxis::Horizon)?;
    for &t in &horizons {
        ControlGrid::steps_for(t, config.dt)?;
    }
    if horizons[0] < 0.0 {
        return Err(CliError::Input("horizons must be nonnegative".into()));
    }
    let progress = Progress::new(horizons.len(), verbose);
    let probe = config.probe.state();
    let points = par_map(config.workers, &horizons, |&t| {
        let mut point = controlled_point(
            config,
            config.noise.model(),
            &probe,
            t,
            config.omega_hat,
            config.omega_true,
            None,
            t,
        );
        match time_oracle(config, t) {
            Ok(v) => point.oracle_qfi = v.unwrap_or(f64::NAN),
            Err(e) => point.add_note(format!("oracle: {e}")),
        }
        progress.tick("horizon", &point);
        point
    })?;
    let table = SweepTable {
        name: "horizon".into(),
        axis: SweepAxis::Horizon,
        points,
    };
    Ok(RunRecord::new(config, started, clock, vec![table]))
}

/// Controls designed at the swept `ω̂₀` (axis `omega_hat`) or once at the
/// configured `ω̂₀` (axis `omega_true`), always evaluated at the true
/// frequency of the point.
pub fn run_robustness_scan(config: &ScenarioConfig, verbose: bool) -> Result<RunRecord, CliError> {
    let (started, clock) = (SystemTime::now(), Instant::now());
    let axis = match &config.sweep {
        Some(s) if matches!(s.axis, SweepAxis::OmegaHat | SweepAxis::OmegaTrue) => s.axis,
        _ => return Err(CliError::Input("a robustness scan needs sweep.axis = omega_hat or omega_true".into())),
    };
    let values = require_values(config, axis)?;
    ControlGrid::steps_for(config.horizon, config.dt)?;
    let schedule = initial_schedule(config)?;
    let probe = config.probe.state();
    let noise = config.noise.model();
    let progress = Progress::new(values.len(), verbose);
    let points = match axis {
        SweepAxis::OmegaHat => par_map(config.workers, &values, |&w_hat| {
            let point = controlled_point(
                config,
                noise,
                &probe,
                config.horizon,
                w_hat,
                config.omega_true,
                schedule.as_ref(),
                w_hat,
            );
            progress.tick("omega_hat", &point);
            point
        })?,
        _ => {
            let design = EstimationProblem::qubit(config.omega_hat, noise, probe.clone(), config.horizon)?;
            let report = optimize(config, &design, schedule.as_ref())?;
            let status = match (&report.error, report.converged) {
                (Some(_), _) => Status::Failed,
                (None, true) => Status::Ok,
                (None, false) => Status::MaxIterations,
            };
            par_map(config.workers, &values, |&w| {
                let mut point = PointResult::blank(w, config.horizon);
                point.status = status;
                if let Some(e) = &report.error {
                    point.add_note(format!("optimizer stopped early: {e}"));
                }
                let truth = design.with_parameter(w);
                let eval = uncontrolled_qfi(&truth, config.dt).and_then(|u| {
                    point.uncontrolled_qfi = u;
                    evaluate_controls(config, &truth, &report.final_grid)
                });
                match eval {
                    Ok((q, f, note)) => {
                        point.qfi = q;
                        point.cfi = f;
                        if let Some(n) = note {
                            point.add_note(n);
                        }
                    }
                    Err(e) => point.fail(e.to_string()),
                }
                progress.tick("omega_true", &point);
                point
            })?
            .into_iter()
            .enumerate()
            .map(|(i, mut p)| {
                // One shared schedule, stored with the first point.
                if i == 0 {
                    p.schedule = Some(report.final_grid.clone());
                }
                p
            })
            .collect()
        }
    };
    let table = SweepTable {
        name: axis.name().into(),
        axis,
        points,
    };
    Ok(RunRecord::new(config, started, clock, vec![table]))
}

fn pulse_model(config: &ScenarioConfig) -> Result<PulseModel, CliError> {
    let n = &config.noise;
    let inferred = if n.is_parallel() {
        Some(PulseModel::Parallel)
    } else if n.kind == NoiseKind::Spontaneous {
        Some(PulseModel::Spontaneous)
    } else {
        None
    };
    let chosen = config.sweep.as_ref().and_then(|s| s.pulse_model).or(inferred);
    match chosen {
        Some(m) if Some(m) == inferred => Ok(m),
        Some(_) => Err(CliError::Input("sweep.pulse_model does not match noise.kind".into())),
        None => Err(CliError::Input(
            "a pulse scan needs parallel dephasing (theta = 0) or spontaneous emission".into(),
        )),
    }
}

/// Single-pulse oracle over the pulse time, against free evolution.
pub fn run_pulse_scan(config: &ScenarioConfig, verbose: bool) -> Result<RunRecord, CliError> {
    let (started, clock) = (SystemTime::now(), Instant::now());
    let t0s = require_values(config, SweepAxis::T0)?;
    let model = pulse_model(config)?;
    if config.probe != ProbeSpec::Plus {
        return Err(CliError::Input("the single-pulse models start from probe = plus".into()));
    }
    let horizon = config.horizon;
    if t0s[0] < 0.0 || t0s[t0s.len() - 1] > horizon {
        return Err(CliError::Input(format!("pulse times must lie in [0, {horizon}]")));
    }
    let n = &config.noise;
    let free = match model {
        PulseModel::Parallel => parallel_free_qfi(n.gamma, horizon)?,
        PulseModel::Spontaneous => spontaneous_free_qfi(n.gamma_plus, n.gamma_minus, horizon)?,
    };
    let progress = Progress::new(t0s.len(), verbose);
    let points = par_map(config.workers, &t0s, |&t0| {
        let mut point = PointResult::blank(t0, horizon);
        point.uncontrolled_qfi = free;
        let value = match model {
            PulseModel::Parallel => {
                parallel_single_pulse_qfi(&SinglePulsePlan::parallel(n.gamma, config.omega_true, t0, horizon))
            }
            PulseModel::Spontaneous => spontaneous_single_pulse_qfi(&spontaneous_plan(config, t0, horizon)),
        };
        match value {
            Ok(v) => {
                point.qfi = v;
                point.oracle_qfi = v;
            }
            Err(e) => point.fail(e.to_string()),
        }
        progress.tick("t0", &point);
        point
    })?;
    let table = SweepTable {
        name: "t0".into(),
        axis: SweepAxis::T0,
        points,
    };
    Ok(RunRecord::new(config, started, clock, vec![table]))
}

/// Dispatches on the configured sweep axis.
pub fn run_sweep(config: &ScenarioConfig, verbose: bool) -> Result<RunRecord, CliError> {
    match config.sweep.as_ref().map(|s| s.axis) {
        Some(SweepAxis::Theta) => run_theta_sweep(config, verbose),
        Some(SweepAxis::Horizon) => run_time_scan(config, verbose),
        Some(SweepAxis::OmegaHat | SweepAxis::OmegaTrue) => run_robustness_scan(config, verbose),
        Some(SweepAxis::T0) => run_pulse_scan(config, verbose),
        None => Err(CliError::Input("the config has no sweep.axis".into())),
    }
}

/// Result of `qgrape optimize`: the single design point plus the ascent
/// history.
pub struct OptimizeRecord {
    pub record: RunRecord,
    pub report: AscentReport,
}

pub fn run_optimize(config: &ScenarioConfig) -> Result<OptimizeRecord, CliError> {
    let (started, clock) = (SystemTime::now(), Instant::now());
    let schedule = initial_schedule(config)?;
    let (mut point, report) = try_controlled_point(
        config,
        config.noise.model(),
        &config.probe.state(),
        config.horizon,
        config.omega_hat,
        config.omega_true,
        schedule.as_ref(),
        config.omega_hat,
    )?;
    point.oracle_qfi = time_oracle(config, config.horizon)?.unwrap_or(f64::NAN);
    let table = SweepTable {
        name: "result".into(),
        axis: SweepAxis::OmegaHat,
        points: vec![point],
    };
    Ok(OptimizeRecord {
        record: RunRecord::new(config, started, clock, vec![table]),
        report,
    })
}

pub fn history_csv(report: &AscentReport) -> String {
    let rows: Vec<Vec<String>> = report
        .objective_history
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.to_string(), fmt_sig(*v, TABLE_DIGITS)])
        .collect();
    csv(&["iteration".into(), "objective".into()], &rows)
}

/// Per-step Bloch vector and QFI of a fixed schedule at `ω₀_true`.
pub struct Simulation {
    pub rows: Vec<[f64; 5]>,
    pub qfi: f64,
    pub cfi: f64,
    pub cfi_note: Option<String>,
}

pub fn simulate(config: &ScenarioConfig, schedule: Option<&ControlGrid>) -> Result<Simulation, CliError> {
    let problem = EstimationProblem::qubit(
        config.omega_true,
        config.noise.model(),
        config.probe.state(),
        config.horizon,
    )?;
    let grid = match schedule {
        Some(g) => {
            if (g.horizon() - config.horizon).abs() > 1e-9 * config.horizon.max(1.0) {
                return Err(CliError::Input(format!(
                    "schedule covers T = {}, config horizon is {}",
                    g.horizon(),
                    config.horizon
                )));
            }
            g.clone()
        }
        None => ControlGrid::zeros(ControlGrid::steps_for(config.horizon, config.dt)?, 3, config.dt)?,
    };
    let traj = propagate(&problem, &grid)?;
    let (q, f, cfi_note) = evaluate_controls(config, &problem, &grid)?;
    let mut rows: Vec<[f64; 5]> = traj
        .states()
        .iter()
        .zip(traj.state_derivatives())
        .enumerate()
        .map(|(j, (rho, drho))| {
            let r = bloch_from_density(rho);
            [j as f64 * grid.dt(), r.r1, r.r2, r.r3, qfi(rho, drho)]
        })
        .collect();
    if let Some(last) = rows.last_mut() {
        last[4] = q;
    }
    Ok(Simulation {
        rows,
        qfi: q,
        cfi: f,
        cfi_note,
    })
}

pub fn trajectory_csv(sim: &Simulation) -> String {
    let header: Vec<String> = ["t", "r1", "r2", "r3", "qfi"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = sim
        .rows
        .iter()
        .map(|r| r.iter().map(|v| fmt_sig(*v, TABLE_DIGITS)).collect())
        .collect();
    csv(&header, &rows)
}

/// `E(t_j) = Δt Σ_{i≤j} Σ_k V_k(i)²` at every step boundary, starting
/// with `(0, 0)`.
pub fn energy_cost(grid: &ControlGrid) -> Vec<(f64, f64)> {
    let dt = grid.dt();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(grid.steps() + 1);
    out.push((0.0, 0.0));
    for j in 0..grid.steps() {
        acc += dt * grid.step(j).iter().map(|v| v * v).sum::<f64>();
        out.push(((j + 1) as f64 * dt, acc));
    }
    out
}
