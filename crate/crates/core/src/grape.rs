//! Gradients of the Fisher information with respect to piecewise-constant
//! control amplitudes, and the gradient-ascent loop built on them.
//!
//! Both objectives share one structure. With weights `(W₁, W₂)` equal to
//! `(L_s, L_s²)` for the QFI or `(L̃₁, L̃₂)` for the CFI, a variation of the
//! controls changes the objective by `2Tr[W₁ δ(∂ₓρ_T)] − Tr[W₂ δρ_T]`.
//!
//! [`GradientMethod::FirstOrder`] evaluates this through the M-operators,
//! which approximate `δ exp(Δt𝓛_j)/δV_k(j)` by `−iΔt H_k^× exp(Δt𝓛_j)` and
//! are therefore accurate to first order in `Δt`.
//! [`GradientMethod::Exact`] differentiates the discretized map exactly,
//! using Fréchet derivatives of the step exponentials and a backward
//! (adjoint) sweep, and agrees with finite differences to rounding error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    build_liouvillian, parameter_direction, propagate, terminal_state_and_derivative,
    ControlGrid, DensityState, EstimationProblem, Trajectory,
};
use crate::error::{invalid, Error, Result};
use crate::fisher::{
    cfi, cfi_with_curvature, classical_weights, qfi, qfi_with_curvature, sld, Povm,
    DEFAULT_RANK_TOLERANCE,
};
use crate::linalg::{
    c, commutator_matrix, devectorize, exp_multi_jet, hermiticity_defect, trace_functional, vectorize,
    Mat2, Mat4, Row4, Vec4, I,
};

/// What the ascent maximizes.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Qfi,
    Cfi(Povm),
}

impl Objective {
    /// Objective from a terminal state and its first derivative.
    pub fn value(&self, rho: &DensityState, drho: &Mat2) -> Result<f64> {
        match self {
            Objective::Qfi => Ok(qfi(rho, drho)),
            Objective::Cfi(povm) => cfi(rho, drho, povm),
        }
    }

    /// Objective at the end of a trajectory, continuous across rank changes
    /// of the terminal state.
    pub fn evaluate(&self, traj: &Trajectory) -> Result<f64> {
        let rho = traj.final_state();
        let drho = crate::fisher::terminal_derivative(traj);
        let d2rho = traj.final_second_derivative();
        match self {
            Objective::Qfi => Ok(qfi_with_curvature(rho, &drho, d2rho, DEFAULT_RANK_TOLERANCE)),
            Objective::Cfi(povm) => cfi_with_curvature(rho, &drho, d2rho, povm),
        }
    }

    fn weights(&self, rho: &DensityState, drho: &Mat2) -> Result<(Mat2, Mat2)> {
        match self {
            Objective::Qfi => {
                let l = sld(rho, drho, DEFAULT_RANK_TOLERANCE).matrix;
                Ok((l, l * l))
            }
            Objective::Cfi(povm) => classical_weights(rho, drho, povm),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientMethod {
    #[default]
    Exact,
    FirstOrder,
}

/// `δF/δV_k(j)` for every step `j` (rows, from 0) and control `k` (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientTable {
    steps: usize,
    controls: usize,
    values: Vec<f64>,
}

impl GradientTable {
    fn zeros(steps: usize, controls: usize) -> Self {
        Self {
            steps,
            controls,
            values: vec![0.0; steps * controls],
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn controls(&self) -> usize {
        self.controls
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.controls + k]
    }

    fn set(&mut self, j: usize, k: usize, v: f64) {
        self.values[j * self.controls + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// The three operators entering the first-order gradient at one `(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MOperators {
    pub m1: Mat2,
    pub m2: Mat2,
    pub m3: Mat2,
}

fn check_shapes(traj: &Trajectory, problem: &EstimationProblem) -> Result<()> {
    if traj.grid().controls() != problem.control_count() {
        return Err(invalid(format!(
            "trajectory has {} controls, problem has {}",
            traj.grid().controls(),
            problem.control_count()
        )));
    }
    Ok(())
}

/// Applies `D_{from+1}^{m}` (steps `from+1 ..= m`).
fn forward(traj: &Trajectory, from: usize, mut v: Vec4) -> Vec4 {
    for p in &traj.step_propagators()[from..] {
        v = p.matrix() * v;
    }
    v
}

/// `M1_j = i D_{j+1}^m H_k^×(ρ_j)`,
/// `M2_j = D_{j+1}^m H_k^× Σ_{i≤j} D_{i+1}^j Ḣ₀^×(ρ_i)` (via the `Φ_j` prefix sum),
/// `M3_j = Σ_{i>j} D_{i+1}^m Ḣ₀^× D_{j+1}^i H_k^×(ρ_j)`.
///
/// `step` runs from 1 to m.
pub fn m_operators(
    traj: &Trajectory,
    problem: &EstimationProblem,
    step: usize,
    control: usize,
) -> Result<MOperators> {
    check_shapes(traj, problem)?;
    let m = traj.steps();
    if step == 0 || step > m {
        return Err(invalid(format!("step index {step} outside 1..={m}")));
    }
    if control >= problem.control_count() {
        return Err(invalid(format!("control index {control} out of range")));
    }
    let hk = commutator_matrix(&problem.controls[control]);
    let hdot = commutator_matrix(problem.free.derivative());
    let rho_j = vectorize(traj.states()[step].matrix());
    let kicked = hk * rho_j;

    let m1 = forward(traj, step, kicked) * I;
    // Φ_j carries the factor −i of ∂ₓ𝓛, so Σ D Ḣ₀^×(ρ_i) = iΦ_j.
    let m2 = forward(traj, step, hk * vectorize(&(traj.phi_accumulators()[step] * I)));
    // Horner form of the sum over i.
    let mut m3 = Vec4::zeros();
    let mut v = kicked;
    for p in &traj.step_propagators()[step..m] {
        v = p.matrix() * v;
        m3 = p.matrix() * m3 + hdot * v;
    }
    let ops = MOperators {
        m1: devectorize(&m1),
        m2: devectorize(&m2),
        m3: devectorize(&m3),
    };
    for (name, op) in [("M1", &ops.m1), ("M2", &ops.m2), ("M3", &ops.m3)] {
        let defect = hermiticity_defect(op);
        if defect > 1e-8 * (1.0 + crate::linalg::max_abs(op)) {
            eprintln!("warning: {name} at step {step}, control {control} departs from Hermitian by {defect:e}");
        }
    }
    Ok(ops)
}

fn terminal_weights(traj: &Trajectory, objective: &Objective) -> Result<(Mat2, Mat2)> {
    let rho = traj.final_state();
    let drho = crate::fisher::terminal_derivative(traj);
    objective.weights(rho, &drho)
}

/// First-order gradient assembled entry by entry from [`m_operators`]:
/// `Δt Tr(W₂ M1) − 2Δt² Tr[W₁ (M2 + M3)]`. Quadratic in the step count.
pub fn gradient_from_m_operators(
    traj: &Trajectory,
    problem: &EstimationProblem,
    objective: &Objective,
) -> Result<GradientTable> {
    check_shapes(traj, problem)?;
    let (w1, w2) = terminal_weights(traj, objective)?;
    let dt = traj.dt();
    let mut table = GradientTable::zeros(traj.steps(), problem.control_count());
    for j in 1..=traj.steps() {
        for k in 0..problem.control_count() {
            let ops = m_operators(traj, problem, j, k)?;
            let g = (w2 * ops.m1).trace() * dt - (w1 * (ops.m2 + ops.m3)).trace() * (2.0 * dt * dt);
            table.set(j - 1, k, g.re);
        }
    }
    Ok(table)
}

fn first_order_adjoint(
    traj: &Trajectory,
    problem: &EstimationProblem,
    w1: &Mat2,
    w2: &Mat2,
) -> GradientTable {
    let dt = traj.dt();
    let m = traj.steps();
    let p = problem.control_count();
    let hks: Vec<Mat4> = problem.controls.iter().map(commutator_matrix).collect();
    let hdot = commutator_matrix(problem.free.derivative());
    let mut table = GradientTable::zeros(m, p);

    // a = Tr(W₁ D_{j+1}^m ·), b = Tr(W₂ D_{j+1}^m ·), cc = Tr(W₁ M3-chain ·).
    let mut a: Row4 = trace_functional(w1);
    let mut b: Row4 = trace_functional(w2);
    let mut cc = Row4::zeros();
    for j in (1..=m).rev() {
        let rho_j = vectorize(traj.states()[j].matrix());
        let iphi = vectorize(&(traj.phi_accumulators()[j] * I));
        for (k, hk) in hks.iter().enumerate() {
            let kicked = hk * rho_j;
            let t1 = (b * kicked)[0] * I;
            let t2 = (a * (hk * iphi))[0];
            let t3 = (cc * kicked)[0];
            let g = t1 * dt - (t2 + t3) * (2.0 * dt * dt);
            table.set(j - 1, k, g.re);
        }
        let prop = traj.step_propagators()[j - 1].matrix();
        cc = (cc + a * hdot) * prop;
        a *= prop;
        b *= prop;
    }
    table
}

fn exact_adjoint(
    traj: &Trajectory,
    problem: &EstimationProblem,
    w1: &Mat2,
    w2: &Mat2,
) -> Result<GradientTable> {
    let dt = traj.dt();
    let m = traj.steps();
    let p = problem.control_count();
    let x_dir = parameter_direction(problem, dt);
    let k_dirs: Vec<Mat4> = problem
        .controls
        .iter()
        .map(|h| commutator_matrix(h) * (-I * dt))
        .collect();
    let mut table = GradientTable::zeros(m, p);

    let mut a: Row4 = trace_functional(w1);
    let mut b: Row4 = trace_functional(w2);
    let mut cc = Row4::zeros();
    for j in (1..=m).rev() {
        let generator = build_liouvillian(problem, traj.grid().step(j - 1), traj.parameter())?;
        let scaled = generator.matrix() * c(dt);
        let rho_prev = vectorize(traj.states()[j - 1].matrix());
        let drho_prev = vectorize(&traj.state_derivatives()[j - 1]);
        let jet = exp_multi_jet(&scaled, &x_dir, &k_dirs);
        for (k, (dk, dxk)) in jet.dk.iter().zip(&jet.dxk).enumerate() {
            let kicked = dk * rho_prev;
            let through = dk * drho_prev + dxk * rho_prev;
            let g = ((a * through)[0] + (cc * kicked)[0]) * 2.0 - (b * kicked)[0];
            table.set(j - 1, k, g.re);
        }
        let prop = traj.step_propagators()[j - 1].matrix();
        let dprop = traj.parameter_propagators()[j - 1].matrix();
        cc = cc * prop + a * dprop;
        a *= prop;
        b *= prop;
    }
    Ok(table)
}

pub fn gradient(
    traj: &Trajectory,
    problem: &EstimationProblem,
    objective: &Objective,
    method: GradientMethod,
) -> Result<GradientTable> {
    check_shapes(traj, problem)?;
    let (w1, w2) = terminal_weights(traj, objective)?;
    match method {
        GradientMethod::FirstOrder => Ok(first_order_adjoint(traj, problem, &w1, &w2)),
        GradientMethod::Exact => exact_adjoint(traj, problem, &w1, &w2),
    }
}

pub fn gradient_qfi(
    traj: &Trajectory,
    problem: &EstimationProblem,
    method: GradientMethod,
) -> Result<GradientTable> {
    gradient(traj, problem, &Objective::Qfi, method)
}

pub fn gradient_cfi(
    traj: &Trajectory,
    problem: &EstimationProblem,
    povm: &Povm,
    method: GradientMethod,
) -> Result<GradientTable> {
    gradient(traj, problem, &Objective::Cfi(povm.clone()), method)
}

/// Objective of a schedule, evaluated the same way as inside [`ascend`].
pub fn objective_of(problem: &EstimationProblem, grid: &ControlGrid, objective: &Objective) -> Result<f64> {
    evaluate(problem, grid, objective).map(|(_, f)| f)
}

/// Objective through the independent block-exponential route.
fn reference_objective(problem: &EstimationProblem, grid: &ControlGrid, objective: &Objective) -> Result<f64> {
    let (rho, drho) = terminal_state_and_derivative(problem, grid)?;
    objective.value(&rho, &drho)
}

/// Central differences `[F(V + δ) − F(V − δ)]/2δ`, one entry at a time.
pub fn finite_difference_gradient(
    problem: &EstimationProblem,
    grid: &ControlGrid,
    objective: &Objective,
    delta: f64,
) -> Result<GradientTable> {
    if !(delta > 0.0) {
        return Err(invalid("finite-difference step must be positive"));
    }
    let mut table = GradientTable::zeros(grid.steps(), grid.controls());
    let mut probe = grid.clone();
    for j in 0..grid.steps() {
        for k in 0..grid.controls() {
            let v = grid.get(j, k);
            probe.set(j, k, v + delta);
            let up = reference_objective(problem, &probe, objective)?;
            probe.set(j, k, v - delta);
            let down = reference_objective(problem, &probe, objective)?;
            probe.set(j, k, v);
            table.set(j, k, (up - down) / (2.0 * delta));
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitMode {
    Zero,
    RandomUniform { low: f64, high: f64 },
    UserSupplied(ControlGrid),
}

/// How the gradient becomes a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateRule {
    /// `V ← V + ε·∇F`.
    Plain,
    /// `V ← V + ε·m̂/√v̂` with bias-corrected running moments of the
    /// gradient. Much faster on the flat ridges typical of long schedules.
    Adam { beta1: f64, beta2: f64 },
}

impl UpdateRule {
    pub fn adam() -> Self {
        UpdateRule::Adam {
            beta1: 0.9,
            beta2: 0.999,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentConfig {
    pub step_size: f64,
    pub max_iterations: usize,
    /// Stop once `|ΔF| < tolerance · max(1, F)` for [`AscentConfig::PATIENCE`] iterations in a row.
    pub tolerance: f64,
    pub seed: u64,
    pub init: InitMode,
    pub dt: f64,
    /// Halve the step (up to 20 times) while it would lower the objective.
    pub backtracking: bool,
    pub method: GradientMethod,
    pub update: UpdateRule,
}

impl AscentConfig {
    pub const PATIENCE: usize = 10;
    pub const MAX_HALVINGS: usize = 20;

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(invalid("step size must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("convergence tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(invalid("at least one iteration is required"));
        }
        if let UpdateRule::Adam { beta1, beta2 } = self.update {
            if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) {
                return Err(invalid("moment decay rates must lie in [0, 1)"));
            }
        }
        if !(self.dt > 0.0) {
            return Err(invalid("time step must be positive"));
        }
        if let InitMode::RandomUniform { low, high } = self.init {
            if !(low <= high) || !low.is_finite() || !high.is_finite() {
                return Err(invalid("random initialization needs finite low ≤ high"));
            }
        }
        Ok(())
    }
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            step_size: 0.01,
            max_iterations: 1000,
            tolerance: 1e-8,
            seed: 0,
            init: InitMode::RandomUniform {
                low: -1.0,
                high: 1.0,
            },
            dt: 0.05,
            backtracking: true,
            method: GradientMethod::Exact,
            update: UpdateRule::Plain,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentReport {
    pub final_grid: ControlGrid,
    /// Objective of the initial grid followed by one entry per iteration.
    pub objective_history: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    /// Set when an evaluation failed mid-run; `final_grid` is the last good one.
    pub error: Option<Error>,
}

impl AscentReport {
    pub fn final_objective(&self) -> Option<f64> {
        self.objective_history.last().copied()
    }
}

pub fn initial_grid(problem: &EstimationProblem, config: &AscentConfig) -> Result<ControlGrid> {
    let m = ControlGrid::steps_for(problem.horizon, config.dt)?;
    let p = problem.control_count();
    match &config.init {
        InitMode::Zero => ControlGrid::zeros(m, p, config.dt),
        InitMode::RandomUniform { low, high } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            ControlGrid::from_fn(m, p, config.dt, |_, _| {
                if low == high {
                    *low
                } else {
                    rng.random_range(*low..*high)
                }
            })
        }
        InitMode::UserSupplied(grid) => {
            if grid.steps() != m || grid.controls() != p || (grid.dt() - config.dt).abs() > 1e-12 {
                return Err(invalid(format!(
                    "supplied schedule is {}×{} at dt {}, expected {m}×{p} at dt {}",
                    grid.steps(),
                    grid.controls(),
                    grid.dt(),
                    config.dt
                )));
            }
            Ok(grid.clone())
        }
    }
}

fn evaluate(
    problem: &EstimationProblem,
    grid: &ControlGrid,
    objective: &Objective,
) -> Result<(Trajectory, f64)> {
    let traj = propagate(problem, grid)?;
    let value = objective.evaluate(&traj)?;
    if !value.is_finite() {
        return Err(Error::NumericalStability {
            step: grid.steps(),
            detail: "objective is not finite".into(),
        });
    }
    Ok((traj, value))
}

/// Gradient ascent on the control amplitudes.
///
/// Errors are returned only for an invalid configuration; failures during
/// the run end it early and are recorded in the report.
pub fn ascend(
    problem: &EstimationProblem,
    config: &AscentConfig,
    objective: &Objective,
) -> Result<AscentReport> {
    config.validate()?;
    problem.validate()?;
    let mut grid = initial_grid(problem, config)?;
    let mut report = AscentReport {
        final_grid: grid.clone(),
        objective_history: Vec::new(),
        iterations_used: 0,
        converged: false,
        error: None,
    };
    let (mut traj, mut value) = match evaluate(problem, &grid, objective) {
        Ok(ok) => ok,
        Err(e) => {
            report.error = Some(e);
            return Ok(report);
        }
    };
    report.objective_history.push(value);
    let mut quiet = 0;
    let mut first_moment = vec![0.0; grid.amplitudes().len()];
    let mut second_moment = first_moment.clone();

    for iteration in 1..=config.max_iterations {
        let step = gradient(&traj, problem, objective, config.method).and_then(|g| {
            if g.is_finite() {
                Ok(g)
            } else {
                Err(Error::NumericalStability {
                    step: 0,
                    detail: "gradient is not finite".into(),
                })
            }
        });
        let g = match step {
            Ok(g) => g,
            Err(e) => {
                report.error = Some(e);
                break;
            }
        };

        let direction: Vec<f64> = match config.update {
            UpdateRule::Plain => g.values().to_vec(),
            UpdateRule::Adam { beta1, beta2 } => {
                let n = iteration as i32;
                let (c1, c2) = (1.0 - beta1.powi(n), 1.0 - beta2.powi(n));
                first_moment
                    .iter_mut()
                    .zip(second_moment.iter_mut())
                    .zip(g.values())
                    .map(|((m, v), d)| {
                        *m = beta1 * *m + (1.0 - beta1) * d;
                        *v = beta2 * *v + (1.0 - beta2) * d * d;
                        let scale = (*v / c2).sqrt();
                        if scale > 0.0 {
                            (*m / c1) / scale
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        };

        let mut eps = config.step_size;
        let mut accepted = None;
        let mut failure = None;
        for _ in 0..=AscentConfig::MAX_HALVINGS {
            let mut candidate = grid.clone();
            for (v, d) in candidate.amplitudes_mut().iter_mut().zip(&direction) {
                *v += eps * d;
            }
            match evaluate(problem, &candidate, objective) {
                Ok((t, f)) if !config.backtracking || f >= value => {
                    accepted = Some((candidate, t, f));
                    break;
                }
                Ok(_) => eps *= 0.5,
                Err(e) if config.backtracking => {
                    failure = Some(e);
                    eps *= 0.5;
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }

        let previous = value;
        match accepted {
            Some((candidate, t, f)) => {
                grid = candidate;
                traj = t;
                value = f;
            }
            None if !config.backtracking => {
                report.error = failure;
                break;
            }
            None => {}
        }
        report.objective_history.push(value);
        report.iterations_used = iteration;

        if (value - previous).abs() < config.tolerance * value.abs().max(1.0) {
            quiet += 1;
            if quiet >= AscentConfig::PATIENCE {
                report.converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    report.final_grid = grid;
    Ok(report)
}
