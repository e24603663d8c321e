//! Controlled open-system dynamics of a single qubit.
//!
//! The generator of step `j` is `𝓛_j = −i[H₀(x) + Σ_k V_k(j) H_k, ·] + Γ` and
//! the state after step `j` is `ρ_j = exp(Δt 𝓛_j) ρ_{j−1}`. Besides the
//! states, [`propagate`] carries the exact parameter derivatives `∂ₓρ_j` and
//! `∂ₓ²ρ_m` of the discretized map, and the first-order accumulators `Φ_j`
//! used by the M-operator gradient.
//!
//! Conventions: `|0⟩` is the `+1` eigenvector of σ₃, `σ₊ = |0⟩⟨1|`, and
//! `ρ = (𝟙 + r·σ)/2`. Under `H = ½ω₀σ₃` the Bloch vector rotates
//! counter-clockwise about z, `r(t) = (cos ω₀t, sin ω₀t, 0)` from `|+⟩`.

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    anticommutator_matrix, c, commutator_matrix, exp_jet, hermitian_eigen, hermiticity_defect,
    identity2, is_hermitian, max_abs, paulis, sandwich, sigma_minus, sigma_plus, sigma_z,
    trace_real, vectorize, devectorize, Mat2, Mat4, C64, I,
};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_SLACK: f64 = 1e-10;
/// Eigenvalues of a propagated state below `-POSITIVITY_FAILURE` abort propagation.
pub const POSITIVITY_FAILURE: f64 = 1e-6;
pub const HORIZON_TOL: f64 = 1e-9;

/// A 2×2 density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState(Mat2);

impl DensityState {
    pub fn new(matrix: Mat2) -> Result<Self> {
        let herm = hermiticity_defect(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(invalid(format!("density matrix is not Hermitian (defect {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr - c(1.0)).norm() > TRACE_TOL {
            return Err(invalid(format!("density matrix trace is {tr}, expected 1")));
        }
        let (eig, _) = hermitian_eigen(&matrix);
        if eig[0] < -POSITIVITY_SLACK {
            return Err(invalid(format!(
                "density matrix has negative eigenvalue {:e}",
                eig[0]
            )));
        }
        Ok(Self(matrix))
    }

    pub(crate) fn from_propagated(matrix: Mat2) -> Self {
        Self(matrix)
    }

    /// Normalized pure state `|ψ⟩⟨ψ|`.
    pub fn pure(amplitudes: [C64; 2]) -> Result<Self> {
        let norm = (amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("pure state amplitudes must be finite and nonzero"));
        }
        let psi = nalgebra::Vector2::new(amplitudes[0] / norm, amplitudes[1] / norm);
        Self::new(psi * psi.adjoint())
    }

    pub fn zero() -> Self {
        Self(Mat2::new(c(1.0), c(0.0), c(0.0), c(0.0)))
    }

    pub fn one() -> Self {
        Self(Mat2::new(c(0.0), c(0.0), c(0.0), c(1.0)))
    }

    pub fn plus() -> Self {
        Self(Mat2::from_element(c(0.5)))
    }

    pub fn minus() -> Self {
        Self(Mat2::new(c(0.5), c(-0.5), c(-0.5), c(0.5)))
    }

    pub fn maximally_mixed() -> Self {
        Self(identity2() * c(0.5))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        hermitian_eigen(&self.0).0
    }

    pub fn bloch(&self) -> BlochVector {
        bloch_from_density(self)
    }
}

/// Real Bloch vector with `|r| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl BlochVector {
    pub const BALL_TOL: f64 = 1e-10;

    pub fn new(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let r = Self { r1, r2, r3 };
        if !(r1.is_finite() && r2.is_finite() && r3.is_finite()) {
            return Err(invalid("Bloch vector components must be finite"));
        }
        if r.norm_sqr() > 1.0 + Self::BALL_TOL {
            return Err(invalid(format!(
                "Bloch vector length {} exceeds 1",
                r.norm_sqr().sqrt()
            )));
        }
        Ok(r)
    }

    pub fn from_array(r: [f64; 3]) -> Result<Self> {
        Self::new(r[0], r[1], r[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dot(&self, v: &[f64; 3]) -> f64 {
        self.r1 * v[0] + self.r2 * v[1] + self.r3 * v[2]
    }
}

pub fn bloch_from_density(rho: &DensityState) -> BlochVector {
    let [r1, r2, r3] = pauli_components(rho.matrix());
    BlochVector { r1, r2, r3 }
}

pub fn density_from_bloch(r: &BlochVector) -> Result<DensityState> {
    let r = BlochVector::new(r.r1, r.r2, r.r3)?;
    Ok(DensityState(identity2() * c(0.5) + from_pauli_components(&r.to_array()) * c(0.5)))
}

/// `(Tr(Aσ₁), Tr(Aσ₂), Tr(Aσ₃))`, real parts.
pub fn pauli_components(a: &Mat2) -> [f64; 3] {
    let p = paulis();
    [0, 1, 2].map(|k| trace_real(&(a * p[k])))
}

/// `v · σ`.
pub fn from_pauli_components(v: &[f64; 3]) -> Mat2 {
    let p = paulis();
    p[0] * c(v[0]) + p[1] * c(v[1]) + p[2] * c(v[2])
}

/// The dissipative part of the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    None,
    /// `(γ/2)(σₙ ρ σₙ − ρ)` with `n = (sinθ cosφ, sinθ sinφ, cosθ)`.
    Dephasing { theta: f64, phi: f64, gamma: f64 },
    /// Raising rate `γ₊` (toward `|0⟩`) and lowering rate `γ₋` (toward `|1⟩`).
    SpontaneousEmission { gamma_plus: f64, gamma_minus: f64 },
}

impl NoiseModel {
    pub fn parallel_dephasing(gamma: f64) -> Self {
        NoiseModel::Dephasing {
            theta: 0.0,
            phi: 0.0,
            gamma,
        }
    }

    pub fn transverse_dephasing(gamma: f64) -> Self {
        NoiseModel::Dephasing {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
            gamma,
        }
    }

    pub fn decay(gamma: f64) -> Self {
        NoiseModel::SpontaneousEmission {
            gamma_plus: 0.0,
            gamma_minus: gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates: &[f64] = match self {
            NoiseModel::None => &[],
            NoiseModel::Dephasing { gamma, theta, phi } => {
                if !theta.is_finite() || !phi.is_finite() {
                    return Err(invalid("dephasing angles must be finite"));
                }
                &[*gamma]
            }
            NoiseModel::SpontaneousEmission {
                gamma_plus,
                gamma_minus,
            } => &[*gamma_plus, *gamma_minus],
        };
        for &r in rates {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(invalid(format!("noise rate {r} must be finite and nonnegative")));
            }
        }
        Ok(())
    }
}

/// Linear map on vectorized 2×2 matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator(Mat4);

impl Superoperator {
    pub fn from_matrix(m: Mat4) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Mat4::identity())
    }

    pub fn zero() -> Self {
        Self(Mat4::zeros())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn apply(&self, x: &Mat2) -> Mat2 {
        devectorize(&(self.0 * vectorize(x)))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator(self.0 * other.0)
    }

    /// Largest entry of `vec(𝟙)ᵀ L`; zero for a trace-annihilating generator.
    pub fn trace_defect(&self) -> f64 {
        let row = self.0.row(0) + self.0.row(3);
        row.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Add for Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: Superoperator) -> Superoperator {
        Superoperator(self.0 + rhs.0)
    }
}

impl std::ops::Mul<C64> for Superoperator {
    type Output = Superoperator;
    fn mul(self, rhs: C64) -> Superoperator {
        Superoperator(self.0 * rhs)
    }
}

pub fn commutator_superop(h: &Mat2) -> Result<Superoperator> {
    if !is_hermitian(h, HERMITIAN_TOL) {
        return Err(invalid("commutator generator must be Hermitian"));
    }
    Ok(Superoperator(commutator_matrix(h)))
}

pub fn dissipator(noise: &NoiseModel) -> Result<Superoperator> {
    noise.validate()?;
    let m = match *noise {
        NoiseModel::None => Mat4::zeros(),
        NoiseModel::Dephasing { theta, phi, gamma } => {
            let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let s = from_pauli_components(&n);
            (sandwich(&s, &s) - Mat4::identity()) * c(gamma / 2.0)
        }
        NoiseModel::SpontaneousEmission {
            gamma_plus,
            gamma_minus,
        } => {
            let (sp, sm) = (sigma_plus(), sigma_minus());
            let raise = sandwich(&sp, &sm) - anticommutator_matrix(&(sm * sp)) * c(0.5);
            let lower = sandwich(&sm, &sp) - anticommutator_matrix(&(sp * sm)) * c(0.5);
            raise * c(gamma_plus) + lower * c(gamma_minus)
        }
    };
    Ok(Superoperator(m))
}

/// `H₀(x) = base + x · generator`, so `∂ₓH₀ = generator` and `∂ₓ²H₀ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeHamiltonian {
    pub base: Mat2,
    pub generator: Mat2,
}

impl FreeHamiltonian {
    /// `H₀(ω₀) = ½ω₀σ₃`.
    pub fn qubit_frequency() -> Self {
        Self {
            base: Mat2::zeros(),
            generator: sigma_z() * c(0.5),
        }
    }

    pub fn at(&self, x: f64) -> Mat2 {
        self.base + self.generator * c(x)
    }

    pub fn derivative(&self) -> &Mat2 {
        &self.generator
    }
}

/// Everything that defines the estimation task except the control values.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationProblem {
    /// Value of the estimated parameter at which dynamics and derivatives are evaluated.
    pub parameter: f64,
    pub free: FreeHamiltonian,
    pub controls: Vec<Mat2>,
    pub noise: NoiseModel,
    pub probe: DensityState,
    pub horizon: f64,
}

impl EstimationProblem {
    pub fn new(
        parameter: f64,
        free: FreeHamiltonian,
        controls: Vec<Mat2>,
        noise: NoiseModel,
        probe: DensityState,
        horizon: f64,
    ) -> Result<Self> {
        let p = Self {
            parameter,
            free,
            controls,
            noise,
            probe,
            horizon,
        };
        p.validate()?;
        Ok(p)
    }

    /// `H = ½ω₀σ₃ + V₁σ₁ + V₂σ₂ + V₃σ₃`, estimating `ω₀`.
    pub fn qubit(omega0: f64, noise: NoiseModel, probe: DensityState, horizon: f64) -> Result<Self> {
        Self::new(
            omega0,
            FreeHamiltonian::qubit_frequency(),
            paulis().to_vec(),
            noise,
            probe,
            horizon,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !self.parameter.is_finite() {
            return Err(invalid("parameter must be finite"));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(invalid("horizon must be finite and nonnegative"));
        }
        for (name, m) in [("base", &self.free.base), ("generator", &self.free.generator)] {
            if !is_hermitian(m, HERMITIAN_TOL) {
                return Err(invalid(format!("free Hamiltonian {name} is not Hermitian")));
            }
        }
        for (k, h) in self.controls.iter().enumerate() {
            if !is_hermitian(h, HERMITIAN_TOL) {
                return Err(invalid(format!("control generator {k} is not Hermitian")));
            }
        }
        self.noise.validate()
    }

    pub fn with_parameter(&self, x: f64) -> Self {
        Self {
            parameter: x,
            ..self.clone()
        }
    }

    pub fn control_count(&self) -> usize {
        self.controls.len()
    }

    pub fn hamiltonian(&self, amplitudes: &[f64], x: f64) -> Mat2 {
        self.controls
            .iter()
            .zip(amplitudes)
            .fold(self.free.at(x), |h, (hk, &v)| h + hk * c(v))
    }
}

pub fn build_liouvillian(
    problem: &EstimationProblem,
    amplitudes: &[f64],
    x: f64,
) -> Result<Superoperator> {
    if amplitudes.len() != problem.control_count() {
        return Err(invalid(format!(
            "expected {} control amplitudes, got {}",
            problem.control_count(),
            amplitudes.len()
        )));
    }
    let h = problem.hamiltonian(amplitudes, x);
    Ok(Superoperator(commutator_matrix(&h) * (-I)) + dissipator(&problem.noise)?)
}

pub fn step_propagator(l: &Superoperator, dt: f64) -> Result<Superoperator> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid(format!("time step {dt} must be positive")));
    }
    Ok(Superoperator((l.0 * c(dt)).exp()))
}

/// Piecewise-constant control amplitudes `V_k(j)`, stored step-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlGrid {
    steps: usize,
    controls: usize,
    dt: f64,
    amplitudes: Vec<f64>,
}

impl ControlGrid {
    pub fn new(steps: usize, controls: usize, dt: f64, amplitudes: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(invalid(format!("time step {dt} must be positive")));
        }
        if amplitudes.len() != steps * controls {
            return Err(invalid(format!(
                "amplitude table has {} entries, expected {steps}×{controls}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|v| !v.is_finite()) {
            return Err(invalid("control amplitudes must be finite"));
        }
        Ok(Self {
            steps,
            controls,
            dt,
            amplitudes,
        })
    }

    pub fn zeros(steps: usize, controls: usize, dt: f64) -> Result<Self> {
        Self::new(steps, controls, dt, vec![0.0; steps * controls])
    }

    /// `f(step, control)` for every entry, steps counted from 0.
    pub fn from_fn(
        steps: usize,
        controls: usize,
        dt: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut amps = Vec::with_capacity(steps * controls);
        for j in 0..steps {
            for k in 0..controls {
                amps.push(f(j, k));
            }
        }
        Self::new(steps, controls, dt, amps)
    }

    /// Step count for a horizon; fails unless `horizon / dt` is an integer within tolerance.
    pub fn steps_for(horizon: f64, dt: f64) -> Result<usize> {
        if !(dt > 0.0) {
            return Err(invalid(format!("time step {dt} must be positive")));
        }
        let m = (horizon / dt).round();
        if (m * dt - horizon).abs() > HORIZON_TOL || m < 0.0 {
            return Err(invalid(format!(
                "horizon {horizon} is not a whole number of steps of width {dt}"
            )));
        }
        Ok(m as usize)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn controls(&self) -> usize {
        self.controls
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [f64] {
        &mut self.amplitudes
    }

    /// Amplitudes of step `j`, counted from 0.
    pub fn step(&self, j: usize) -> &[f64] {
        &self.amplitudes[j * self.controls..(j + 1) * self.controls]
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.amplitudes[j * self.controls + k]
    }

    pub fn set(&mut self, j: usize, k: usize, v: f64) {
        self.amplitudes[j * self.controls + k] = v;
    }
}

/// Cached forward pass of [`propagate`].
///
/// Index conventions follow the math: `states[0] = ρ₀` and `states[j]` is the
/// state after step `j`; `propagators[j−1]` is `exp(Δt𝓛_j)`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub(crate) grid: ControlGrid,
    pub(crate) parameter: f64,
    pub(crate) states: Vec<DensityState>,
    pub(crate) propagators: Vec<Superoperator>,
    pub(crate) parameter_propagators: Vec<Superoperator>,
    pub(crate) phi: Vec<Mat2>,
    pub(crate) drho: Vec<Mat2>,
    pub(crate) d2rho_final: Mat2,
}

impl Trajectory {
    pub fn grid(&self) -> &ControlGrid {
        &self.grid
    }

    pub fn parameter(&self) -> f64 {
        self.parameter
    }

    pub fn steps(&self) -> usize {
        self.grid.steps()
    }

    pub fn dt(&self) -> f64 {
        self.grid.dt()
    }

    pub fn states(&self) -> &[DensityState] {
        &self.states
    }

    pub fn final_state(&self) -> &DensityState {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn step_propagators(&self) -> &[Superoperator] {
        &self.propagators
    }

    /// `∂ₓ exp(Δt𝓛_j)` for each step.
    pub fn parameter_propagators(&self) -> &[Superoperator] {
        &self.parameter_propagators
    }

    /// First-order accumulators with `∂ₓρ_j ≈ Δt·Φ_j`.
    pub fn phi_accumulators(&self) -> &[Mat2] {
        &self.phi
    }

    /// Exact `∂ₓρ_j` of the discretized evolution.
    pub fn state_derivatives(&self) -> &[Mat2] {
        &self.drho
    }

    /// Exact `∂ₓ²ρ_m`.
    pub fn final_second_derivative(&self) -> &Mat2 {
        &self.d2rho_final
    }
}

fn check_horizon(problem: &EstimationProblem, grid: &ControlGrid) -> Result<()> {
    if grid.controls() != problem.control_count() {
        return Err(invalid(format!(
            "grid has {} controls, problem has {}",
            grid.controls(),
            problem.control_count()
        )));
    }
    if (grid.horizon() - problem.horizon).abs() > HORIZON_TOL {
        return Err(invalid(format!(
            "grid spans {} but the horizon is {}",
            grid.horizon(),
            problem.horizon
        )));
    }
    Ok(())
}

/// `Δt · ∂ₓ𝓛 = −iΔt (∂ₓH₀)^×`; the controls and noise do not depend on `x`.
pub(crate) fn parameter_direction(problem: &EstimationProblem, dt: f64) -> Mat4 {
    commutator_matrix(problem.free.derivative()) * (-I * dt)
}

pub fn propagate(problem: &EstimationProblem, grid: &ControlGrid) -> Result<Trajectory> {
    check_horizon(problem, grid)?;
    let dt = grid.dt();
    let x = problem.parameter;
    let m = grid.steps();
    let direction = parameter_direction(problem, dt);
    let hdot = commutator_matrix(problem.free.derivative());

    let mut states = Vec::with_capacity(m + 1);
    let mut propagators = Vec::with_capacity(m);
    let mut parameter_propagators = Vec::with_capacity(m);
    let mut phi = Vec::with_capacity(m + 1);
    let mut drho = Vec::with_capacity(m + 1);

    let mut rho = vectorize(problem.probe.matrix());
    let mut d1 = crate::linalg::Vec4::zeros();
    let mut d2 = crate::linalg::Vec4::zeros();
    let mut acc = crate::linalg::Vec4::zeros();
    states.push(problem.probe.clone());
    phi.push(Mat2::zeros());
    drho.push(Mat2::zeros());

    for j in 1..=m {
        let l = build_liouvillian(problem, grid.step(j - 1), x)?;
        let jet = exp_jet(&(l.0 * c(dt)), &direction, &direction);
        let p = jet.value;
        let next_d2 = p * d2 + jet.d1 * d1 * c(2.0) + jet.d12 * rho;
        let next_d1 = p * d1 + jet.d1 * rho;
        rho = p * rho;
        d1 = next_d1;
        d2 = next_d2;
        acc = p * acc - hdot * rho * I;

        let state = devectorize(&rho);
        let (eig, _) = hermitian_eigen(&state);
        if !eig[0].is_finite() || eig[0] < -POSITIVITY_FAILURE || max_abs(&state).is_nan() {
            return Err(Error::NumericalStability {
                step: j,
                detail: format!("state eigenvalue {:e} violates positivity", eig[0]),
            });
        }
        states.push(DensityState::from_propagated(state));
        propagators.push(Superoperator(p));
        parameter_propagators.push(Superoperator(jet.d1));
        phi.push(devectorize(&acc));
        drho.push(devectorize(&d1));
    }

    Ok(Trajectory {
        grid: grid.clone(),
        parameter: x,
        states,
        propagators,
        parameter_propagators,
        phi,
        drho,
        d2rho_final: devectorize(&d2),
    })
}

/// Terminal state and exact first parameter derivative, without caching the
/// trajectory. Evaluates each step with the 8×8 block exponential
/// `exp([[Δt𝓛, Δt∂ₓ𝓛], [0, Δt𝓛]])`, a route independent of [`propagate`].
pub fn terminal_state_and_derivative(
    problem: &EstimationProblem,
    grid: &ControlGrid,
) -> Result<(DensityState, Mat2)> {
    check_horizon(problem, grid)?;
    let dt = grid.dt();
    let direction = parameter_direction(problem, dt);
    let mut rho = vectorize(problem.probe.matrix());
    let mut d1 = crate::linalg::Vec4::zeros();
    for j in 0..grid.steps() {
        let l = build_liouvillian(problem, grid.step(j), problem.parameter)?;
        let mut block = nalgebra::SMatrix::<C64, 8, 8>::zeros();
        block.fixed_view_mut::<4, 4>(0, 0).copy_from(&(l.0 * c(dt)));
        block.fixed_view_mut::<4, 4>(4, 4).copy_from(&(l.0 * c(dt)));
        block.fixed_view_mut::<4, 4>(0, 4).copy_from(&direction);
        let e = block.exp();
        let p = e.fixed_view::<4, 4>(0, 0).into_owned();
        let x = e.fixed_view::<4, 4>(0, 4).into_owned();
        d1 = p * d1 + x * rho;
        rho = p * rho;
    }
    let state = devectorize(&rho);
    let (eig, _) = hermitian_eigen(&state);
    if !eig[0].is_finite() || eig[0] < -POSITIVITY_FAILURE {
        return Err(Error::NumericalStability {
            step: grid.steps(),
            detail: format!("state eigenvalue {:e} violates positivity", eig[0]),
        });
    }
    Ok((DensityState::from_propagated(state), devectorize(&d1)))
}

/// Hermitian-part cleanup used when handing matrices to callers that
/// validate strictly.
pub fn hermitian_part(m: &Mat2) -> Mat2 {
    (m + m.adjoint()) * c(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sigma_y;

    fn random_hermitian(seed: &mut u64) -> Mat2 {
        let mut next = || {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let (a, b, re, im) = (next(), next(), next(), next());
        Mat2::new(c(a), C64::new(re, -im), C64::new(re, im), c(b))
    }

    fn random_state(seed: &mut u64) -> DensityState {
        let h = random_hermitian(seed);
        let m = h * h.adjoint() + Mat2::identity() * c(0.1);
        let tr = m.trace();
        DensityState::new(m / tr).unwrap()
    }

    #[test]
    fn commutator_of_zero_is_zero() {
        let s = commutator_superop(&Mat2::zeros()).unwrap();
        assert_eq!(*s.matrix(), Mat4::zeros());
    }

    #[test]
    fn commutator_matches_direct_product() {
        let h = sigma_z() * c(0.5);
        let rho = DensityState::plus();
        let got = commutator_superop(&h).unwrap().apply(rho.matrix());
        let direct = h * rho.matrix() - rho.matrix() * h;
        assert!(max_abs(&(got - direct)) < 1e-15);
        // ½[σ₃, |+⟩⟨+|] = (i/2)σ₂
        assert!(max_abs(&(got - sigma_y() * (I * 0.5))) < 1e-15);

        let mut seed = 11;
        for _ in 0..50 {
            let h = random_hermitian(&mut seed);
            let rho = random_state(&mut seed);
            let got = commutator_superop(&h).unwrap().apply(rho.matrix());
            let direct = h * rho.matrix() - rho.matrix() * h;
            assert!(max_abs(&(got - direct)) < 1e-12);
        }
    }

    #[test]
    fn commutator_rejects_non_hermitian() {
        let a = Mat2::new(c(0.0), c(1.0), c(0.0), c(0.0));
        assert!(matches!(commutator_superop(&a), Err(Error::Validation(_))));
    }

    #[test]
    fn parallel_dephasing_leaves_diagonal_states_alone() {
        let g = dissipator(&NoiseModel::parallel_dephasing(0.3)).unwrap();
        let rho = Mat2::new(c(0.7), c(0.0), c(0.0), c(0.3));
        assert!(max_abs(&g.apply(&rho)) < 1e-15);
    }

    #[test]
    fn decay_relaxes_toward_lower_pole() {
        let gamma = 0.2;
        let l = dissipator(&NoiseModel::decay(gamma)).unwrap();
        for (t, r3_0) in [(0.5, 1.0), (3.0, 1.0), (2.0, -0.4)] {
            let rho0 = density_from_bloch(&BlochVector::new(0.0, 0.0, r3_0).unwrap()).unwrap();
            let rho = step_propagator(&l, t).unwrap().apply(rho0.matrix());
            let r3 = pauli_components(&rho)[2];
            let expected = -1.0 + (-gamma * t).exp() + (-gamma * t).exp() * r3_0;
            assert!((r3 - expected).abs() < 1e-12, "{r3} vs {expected}");
        }
    }

    #[test]
    fn transverse_dephasing_euler_step_matches_bloch_odes() {
        let gamma = 0.1;
        let g = dissipator(&NoiseModel::transverse_dephasing(gamma)).unwrap();
        let r = [0.3, -0.4, 0.5];
        let rho = identity2() * c(0.5) + from_pauli_components(&r) * c(0.5);
        let rate = pauli_components(&g.apply(&rho));
        assert!((rate[0]).abs() < 1e-15);
        assert!((rate[1] + gamma * r[1]).abs() < 1e-15);
        assert!((rate[2] + gamma * r[2]).abs() < 1e-15);
    }

    #[test]
    fn negative_rate_is_rejected() {
        assert!(dissipator(&NoiseModel::decay(-0.1)).is_err());
        assert!(dissipator(&NoiseModel::Dephasing {
            theta: 0.0,
            phi: 0.0,
            gamma: -1.0
        })
        .is_err());
    }

    #[test]
    fn liouvillian_assembly() {
        let problem =
            EstimationProblem::qubit(1.0, NoiseModel::None, DensityState::plus(), 1.0).unwrap();
        let l = build_liouvillian(&problem, &[0.0, 0.0, 0.0], 1.0).unwrap();
        let expected = commutator_matrix(&(sigma_z() * c(0.5))) * (-I);
        assert!((l.matrix() - expected).norm() < 1e-15);

        let transverse = EstimationProblem::qubit(
            1.0,
            NoiseModel::transverse_dephasing(0.1),
            DensityState::plus(),
            1.0,
        )
        .unwrap();
        let l = build_liouvillian(&transverse, &[0.0, 0.0, -0.5], 1.0).unwrap();
        let d = dissipator(&transverse.noise).unwrap();
        assert!((l.matrix() - d.matrix()).norm() < 1e-15);

        assert!(build_liouvillian(&problem, &[0.0], 1.0).is_err());
    }

    #[test]
    fn liouvillians_annihilate_the_trace() {
        let mut seed = 5;
        let noises = [
            NoiseModel::None,
            NoiseModel::Dephasing {
                theta: 0.7,
                phi: 1.9,
                gamma: 0.4,
            },
            NoiseModel::SpontaneousEmission {
                gamma_plus: 0.2,
                gamma_minus: 0.3,
            },
        ];
        for noise in noises {
            let problem = EstimationProblem::qubit(1.3, noise, DensityState::plus(), 1.0).unwrap();
            for _ in 0..10 {
                let h = random_hermitian(&mut seed);
                let amps = pauli_components(&h);
                let l = build_liouvillian(&problem, &amps, 1.3).unwrap();
                assert!(l.trace_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_generator_propagates_to_identity() {
        let p = step_propagator(&Superoperator::zero(), 0.3).unwrap();
        assert_eq!(*p.matrix(), Mat4::identity());
        assert!(step_propagator(&Superoperator::zero(), 0.0).is_err());
    }

    #[test]
    fn parallel_dephasing_free_evolution() {
        let (gamma, w, t) = (0.1, 1.0, 2.7);
        let problem = EstimationProblem::qubit(
            w,
            NoiseModel::parallel_dephasing(gamma),
            DensityState::plus(),
            t,
        )
        .unwrap();
        let l = build_liouvillian(&problem, &[0.0; 3], w).unwrap();
        let rho = step_propagator(&l, t).unwrap().apply(DensityState::plus().matrix());
        let r = pauli_components(&rho);
        let decay = (-gamma * t).exp();
        assert!((r[0] - decay * (w * t).cos()).abs() < 1e-12);
        assert!((r[1] - decay * (w * t).sin()).abs() < 1e-12);
        assert!(r[2].abs() < 1e-12);
    }

    #[test]
    fn unitary_steps_preserve_purity() {
        let problem =
            EstimationProblem::qubit(1.0, NoiseModel::None, DensityState::plus(), 2.0).unwrap();
        let grid = ControlGrid::from_fn(40, 3, 0.05, |j, k| ((j * 3 + k) as f64 * 0.7).sin()).unwrap();
        let traj = propagate(&problem, &grid).unwrap();
        for s in traj.states() {
            assert!((s.bloch().norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn free_rotation_from_plus() {
        let problem =
            EstimationProblem::qubit(1.0, NoiseModel::None, DensityState::plus(), 1.0).unwrap();
        let grid = ControlGrid::zeros(10, 3, 0.1).unwrap();
        let r = propagate(&problem, &grid).unwrap().final_state().bloch();
        assert!((r.r1 - 1f64.cos()).abs() < 1e-12);
        assert!((r.r2 - 1f64.sin()).abs() < 1e-12);
        assert!(r.r3.abs() < 1e-12);
    }

    #[test]
    fn horizon_mismatch_is_rejected() {
        let problem =
            EstimationProblem::qubit(1.0, NoiseModel::None, DensityState::plus(), 1.0).unwrap();
        let grid = ControlGrid::zeros(11, 3, 0.1).unwrap();
        assert!(matches!(propagate(&problem, &grid), Err(Error::Validation(_))));
        assert!(ControlGrid::steps_for(1.0, 0.3).is_err());
        assert_eq!(ControlGrid::steps_for(5.0, 0.05).unwrap(), 100);
    }

    #[test]
    fn bloch_round_trip() {
        let plus = bloch_from_density(&DensityState::plus());
        assert!((plus.r1 - 1.0).abs() < 1e-15 && plus.r2.abs() < 1e-15 && plus.r3.abs() < 1e-15);
        let mixed = bloch_from_density(&DensityState::maximally_mixed());
        assert_eq!(mixed.to_array(), [0.0, 0.0, 0.0]);
        let back = density_from_bloch(&BlochVector::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(max_abs(&(back.matrix() - DensityState::plus().matrix())) < 1e-15);
        assert!(BlochVector::new(1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn grid_accessors() {
        let mut g = ControlGrid::from_fn(3, 2, 0.5, |j, k| (10 * j + k) as f64).unwrap();
        assert_eq!(g.step(1), &[10.0, 11.0]);
        g.set(2, 1, -1.0);
        assert_eq!(g.get(2, 1), -1.0);
        assert_eq!(g.horizon(), 1.5);
        assert!(ControlGrid::new(1, 1, 0.1, vec![f64::NAN]).is_err());
        assert!(ControlGrid::new(1, 1, -0.1, vec![0.0]).is_err());
    }

    #[test]
    fn transverse_optimum_keeps_plus_stationary() {
        let problem = EstimationProblem::qubit(
            1.0,
            NoiseModel::transverse_dephasing(0.1),
            DensityState::plus(),
            1.0,
        )
        .unwrap();
        let grid = ControlGrid::from_fn(20, 3, 0.05, |_, k| if k == 2 { -0.5 } else { 0.0 }).unwrap();
        let traj = propagate(&problem, &grid).unwrap();
        let r = traj.final_state().bloch();
        assert!((r.r1 - 1.0).abs() < 1e-14);
    }
}
