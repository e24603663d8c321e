//! Closed-form Bloch trajectories and Fisher information for the
//! uncontrolled and single-pulse strategies.
//!
//! Two orientation conventions appear. The transverse and parallel
//! dephasing formulas rotate the Bloch vector clockwise about `z`
//! (`r₂ = −sin ω₀t` from `|+⟩`), which is the mirror image of the
//! propagator in [`crate::dynamics`]; the spontaneous-emission formulas
//! rotate counter-clockwise and coincide with it. Fisher information is
//! unaffected by the mirror.

use crate::dynamics::BlochVector;
use crate::error::{invalid, Error, Result};
use crate::fisher::qfi_bloch;

/// Below this `|a|t` the transverse solution switches to its Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-6;

fn check_rate(name: &str, gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(invalid(format!("{name} must be a finite non-negative rate, got {gamma}")));
    }
    Ok(())
}

fn check_time(name: &str, t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("{name} must be a finite non-negative time, got {t}")));
    }
    Ok(())
}

/// `(2/γ²)(e^{−γT} + γT − 1)`, the QFI reached when the controls cancel the
/// free Hamiltonian under transverse dephasing. Tends to `T²` as `γ → 0`.
pub fn transverse_controlled_qfi(gamma: f64, horizon: f64) -> Result<f64> {
    check_rate("gamma", gamma)?;
    check_time("horizon", horizon)?;
    let x = gamma * horizon;
    let ratio = if x < 1e-3 {
        1.0 - x / 3.0 + x * x / 12.0 - x * x * x / 60.0
    } else {
        2.0 * ((-x).exp_m1() + x) / (x * x)
    };
    Ok(horizon * horizon * ratio)
}

/// Free evolution from `|+⟩` under transverse dephasing,
/// `ṙ₁ = ω₀r₂`, `ṙ₂ = −γr₂ − ω₀r₁`, `r₃ = 0`, with `a = √(γ² − 4ω₀²)`.
pub fn transverse_bloch(gamma: f64, omega0: f64, t: f64) -> Result<BlochVector> {
    check_rate("gamma", gamma)?;
    check_time("t", t)?;
    let disc = gamma * gamma - 4.0 * omega0 * omega0;
    let half = 0.5 * t;
    // r₁ = e^{−γt/2}(γ·S + C), r₂ = −2ω₀ e^{−γt/2} S with S = sinh(at/2)/a, C = cosh(at/2).
    let (r1, r2) = if disc.abs().sqrt() * t < SERIES_THRESHOLD {
        let u = disc * half * half;
        let damp = (-gamma * half).exp();
        let s = half * (1.0 + u / 6.0);
        let cc = 1.0 + u / 2.0;
        (damp * (gamma * s + cc), -2.0 * omega0 * damp * s)
    } else if disc > 0.0 {
        let a = disc.sqrt();
        // e^{−γt/2}e^{±at/2} combined to avoid overflow for long times.
        let up = ((a - gamma) * half).exp();
        let down = (-(a + gamma) * half).exp();
        let damped_s = 0.5 * (up - down) / a;
        let damped_c = 0.5 * (up + down);
        (gamma * damped_s + damped_c, -2.0 * omega0 * damped_s)
    } else {
        let b = (-disc).sqrt();
        let damp = (-gamma * half).exp();
        let s = (b * half).sin() / b;
        let cc = (b * half).cos();
        (damp * (gamma * s + cc), -2.0 * omega0 * damp * s)
    };
    BlochVector::new(r1, r2, 0.0)
}

/// `t² e^{−2γt}`, free evolution from `|+⟩` under parallel dephasing.
pub fn parallel_free_qfi(gamma: f64, t: f64) -> Result<f64> {
    check_rate("gamma", gamma)?;
    check_time("t", t)?;
    Ok(t * t * (-2.0 * gamma * t).exp())
}

/// Free evolution from `|+⟩` for `t₀`, an instantaneous rotation, then free
/// evolution up to `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePulsePlan {
    pub t0: f64,
    pub horizon: f64,
    /// Frequency at which the state and its derivative are evaluated.
    pub omega0: f64,
    /// Frequency used to design the rotation (spontaneous emission only).
    pub omega_bar: f64,
    /// Dephasing rate, or the decay rate `γ₋` for spontaneous emission.
    pub gamma: f64,
    /// Excitation rate `γ₊` (spontaneous emission only).
    pub gamma_plus: f64,
}

impl SinglePulsePlan {
    /// `π/2` pulse about `y` under parallel dephasing.
    pub fn parallel(gamma: f64, omega0: f64, t0: f64, horizon: f64) -> Self {
        Self {
            t0,
            horizon,
            omega0,
            omega_bar: omega0,
            gamma,
            gamma_plus: 0.0,
        }
    }

    /// Rotation back into the `x−y` plane under decay at rate `γ`, designed
    /// and evaluated at the true frequency.
    pub fn spontaneous(gamma: f64, omega0: f64, t0: f64, horizon: f64) -> Self {
        Self {
            t0,
            horizon,
            omega0,
            omega_bar: omega0,
            gamma,
            gamma_plus: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_rate("gamma", self.gamma)?;
        check_rate("gamma_plus", self.gamma_plus)?;
        check_time("horizon", self.horizon)?;
        check_time("t0", self.t0)?;
        if self.t0 > self.horizon {
            return Err(invalid(format!(
                "pulse time {} lies beyond the horizon {}",
                self.t0, self.horizon
            )));
        }
        if !self.omega0.is_finite() || !self.omega_bar.is_finite() {
            return Err(invalid("frequencies must be finite"));
        }
        Ok(())
    }
}

/// Final Bloch vector and its `ω₀` derivative for the parallel single-pulse
/// strategy, in the clockwise convention:
/// `r(T) = (e^{−γT} sin ω₀Δ sin ω₀t₀, e^{−γT} cos ω₀Δ sin ω₀t₀, e^{−γt₀} cos ω₀t₀)`
/// with `Δ = T − t₀`.
pub fn parallel_single_pulse_bloch(plan: &SinglePulsePlan) -> Result<(BlochVector, [f64; 3])> {
    plan.validate()?;
    let (t0, w, g) = (plan.t0, plan.omega0, plan.gamma);
    let rest = plan.horizon - t0;
    let late = (-g * plan.horizon).exp();
    let early = (-g * t0).exp();
    let (s0, c0) = (w * t0).sin_cos();
    let (sd, cd) = (w * rest).sin_cos();
    let r = BlochVector::new(late * sd * s0, late * cd * s0, early * c0)?;
    let dr = [
        late * (rest * cd * s0 + t0 * sd * c0),
        late * (-rest * sd * s0 + t0 * cd * c0),
        -early * t0 * s0,
    ];
    Ok((r, dr))
}

/// Closed-form QFI of the parallel single-pulse strategy:
/// `e^{−2γt₀}t₀² sin²ω₀t₀ + e^{−2γT}[t₀² + T(T − 2t₀) sin²ω₀t₀]
///  + t₀²(e^{−2γT} − e^{−2γt₀})² sin²ω₀t₀ cos²ω₀t₀ / (1 − e^{−2γT} sin²ω₀t₀ − e^{−2γt₀} cos²ω₀t₀)`.
///
/// The last term is dropped when its numerator vanishes, which covers the
/// pure final states at `t₀ = 0` and `γ = 0`.
pub fn parallel_single_pulse_qfi(plan: &SinglePulsePlan) -> Result<f64> {
    plan.validate()?;
    let (t0, t, w, g) = (plan.t0, plan.horizon, plan.omega0, plan.gamma);
    let late = (-2.0 * g * t).exp();
    let early = (-2.0 * g * t0).exp();
    let (s0, c0) = (w * t0).sin_cos();
    let (s2, c2) = (s0 * s0, c0 * c0);
    let first = early * t0 * t0 * s2;
    let second = late * (t0 * t0 + t * (t - 2.0 * t0) * s2);
    let numerator = t0 * t0 * (late - early).powi(2) * s2 * c2;
    let denominator = 1.0 - late * s2 - early * c2;
    let third = if numerator <= 1e-300 {
        0.0
    } else if denominator <= 0.0 {
        return Err(Error::InconsistentInput(numerator.sqrt()));
    } else {
        numerator / denominator
    };
    Ok(first + second + third)
}

/// Free evolution under `γ₊` excitation and `γ₋` decay, counter-clockwise
/// at `ω₀`: transverse components decay at `(γ₊+γ₋)/2` and
/// `r₃ → (γ₊−γ₋)/(γ₊+γ₋)`.
pub fn spontaneous_free_bloch(
    gamma_plus: f64,
    gamma_minus: f64,
    omega0: f64,
    t: f64,
    r0: &BlochVector,
) -> Result<BlochVector> {
    check_rate("gamma_plus", gamma_plus)?;
    check_rate("gamma_minus", gamma_minus)?;
    check_time("t", t)?;
    let total = gamma_plus + gamma_minus;
    let shrink = (-0.5 * total * t).exp();
    let (s, c) = (omega0 * t).sin_cos();
    let r3 = if total > 0.0 {
        let relax = -(-total * t).exp_m1();
        (gamma_plus - gamma_minus) / total * relax + (-total * t).exp() * r0.r3
    } else {
        r0.r3
    };
    BlochVector::new(
        shrink * (c * r0.r1 - s * r0.r2),
        shrink * (c * r0.r2 + s * r0.r1),
        r3,
    )
}

/// `e^{−(γ₊+γ₋)T} T²` for the probe `|+⟩`.
pub fn spontaneous_free_qfi(gamma_plus: f64, gamma_minus: f64, horizon: f64) -> Result<f64> {
    check_rate("gamma_plus", gamma_plus)?;
    check_rate("gamma_minus", gamma_minus)?;
    check_time("horizon", horizon)?;
    Ok((-(gamma_plus + gamma_minus) * horizon).exp() * horizon * horizon)
}

/// Rotation about `y` carrying the `x−z` part of `r` onto `+x`:
/// `[[c, 0, s], [0, 1, 0], [−s, 0, c]]` with `(c, s) = (r₁, r₃)/√(r₁² + r₃²)`.
pub fn plane_rotation(r: &BlochVector) -> Result<[[f64; 3]; 3]> {
    let n = r.r1.hypot(r.r3);
    if n == 0.0 {
        return Err(Error::UndefinedRotation);
    }
    let (c, s) = (r.r1 / n, r.r3 / n);
    Ok([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
}

fn rotate(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

/// Final Bloch vector and its `ω₀` derivative for the spontaneous-emission
/// single-pulse strategy. The rotation is built from the pre-pulse state at
/// `ω̄₀` and held fixed when differentiating.
pub fn spontaneous_single_pulse_bloch(plan: &SinglePulsePlan) -> Result<(BlochVector, [f64; 3])> {
    plan.validate()?;
    let (gp, gm) = (plan.gamma_plus, plan.gamma);
    let total = gp + gm;
    let plus = BlochVector::new(1.0, 0.0, 0.0)?;
    let design = spontaneous_free_bloch(gp, gm, plan.omega_bar, plan.t0, &plus)?;
    let rot = plane_rotation(&design)?;

    let before = spontaneous_free_bloch(gp, gm, plan.omega0, plan.t0, &plus)?;
    let shrink0 = (-0.5 * total * plan.t0).exp();
    let (s0, c0) = (plan.omega0 * plan.t0).sin_cos();
    let dbefore = [-shrink0 * plan.t0 * s0, shrink0 * plan.t0 * c0, 0.0];

    let after = rotate(&rot, &before.to_array());
    let dafter = rotate(&rot, &dbefore);
    let rest = plan.horizon - plan.t0;
    let r = spontaneous_free_bloch(gp, gm, plan.omega0, rest, &BlochVector::from_array(after)?)?;
    let shrink = (-0.5 * total * rest).exp();
    let (s, c) = (plan.omega0 * rest).sin_cos();
    let dr = [
        shrink * (c * dafter[0] - s * dafter[1] - rest * (s * after[0] + c * after[1])),
        shrink * (c * dafter[1] + s * dafter[0] + rest * (c * after[0] - s * after[1])),
        (-total * rest).exp() * dafter[2],
    ];
    Ok((r, dr))
}

pub fn spontaneous_single_pulse_qfi(plan: &SinglePulsePlan) -> Result<f64> {
    let (r, dr) = spontaneous_single_pulse_bloch(plan)?;
    qfi_bloch(&r, &dr)
}

/// Evaluates `f` at `points` evenly spaced pulse times in `[0, T]` and
/// returns `(t₀, value)` of the best one.
pub fn best_pulse_time(
    horizon: f64,
    points: usize,
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    check_time("horizon", horizon)?;
    if points < 2 {
        return Err(invalid("a pulse-time scan needs at least two points"));
    }
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..points {
        let t0 = horizon * i as f64 / (points - 1) as f64;
        let v = f(t0)?;
        if v > best.1 {
            best = (t0, v);
        }
    }
    Ok(best)
}
