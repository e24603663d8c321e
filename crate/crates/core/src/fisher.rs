//! Symmetric logarithmic derivative, quantum and classical Fisher information.

use crate::dynamics::{BlochVector, DensityState, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::linalg::{c, hermitian_eigen, is_hermitian, max_abs, trace_real, Mat2};

pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-12;
/// Outcome probabilities below this are treated as zero.
pub const PROBABILITY_FLOOR: f64 = 1e-12;
/// A zero-probability outcome whose derivative exceeds this makes the CFI diverge.
pub const SINGULAR_DERIVATIVE: f64 = 1e-9;
pub const POVM_TOL: f64 = 1e-10;

/// Positive operator-valued measure on a qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<Mat2>,
}

impl Povm {
    pub fn new(effects: Vec<Mat2>) -> Result<Self> {
        if effects.is_empty() {
            return Err(invalid("a POVM needs at least one effect"));
        }
        let mut total = Mat2::zeros();
        for (y, e) in effects.iter().enumerate() {
            if !is_hermitian(e, POVM_TOL) {
                return Err(invalid(format!("POVM effect {y} is not Hermitian")));
            }
            let (eig, _) = hermitian_eigen(e);
            if eig[0] < -POVM_TOL {
                return Err(invalid(format!("POVM effect {y} is not positive ({:e})", eig[0])));
            }
            total += e;
        }
        if max_abs(&(total - Mat2::identity())) > POVM_TOL {
            return Err(invalid("POVM effects do not sum to the identity"));
        }
        Ok(Self { effects })
    }

    /// `{|+⟩⟨+|, |−⟩⟨−|}`.
    pub fn plus_minus() -> Self {
        Self {
            effects: vec![
                *DensityState::plus().matrix(),
                *DensityState::minus().matrix(),
            ],
        }
    }

    /// `{|0⟩⟨0|, |1⟩⟨1|}`.
    pub fn computational() -> Self {
        Self {
            effects: vec![*DensityState::zero().matrix(), *DensityState::one().matrix()],
        }
    }

    /// `{𝟙}`, which carries no information.
    pub fn trivial() -> Self {
        Self {
            effects: vec![Mat2::identity()],
        }
    }

    pub fn effects(&self) -> &[Mat2] {
        &self.effects
    }
}

/// Solution `L` of `2∂ₓρ = ρL + Lρ`, zero on the kernel of `ρ⊗𝟙 + 𝟙⊗ρᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SldOperator {
    pub matrix: Mat2,
    pub rank_tolerance: f64,
}

struct Spectral {
    values: [f64; 2],
    vectors: Mat2,
    /// `drho` in the eigenbasis of ρ.
    derivative: Mat2,
}

fn spectral(rho: &DensityState, drho: &Mat2) -> Spectral {
    let (values, vectors) = hermitian_eigen(rho.matrix());
    let derivative = vectors.adjoint() * drho * vectors;
    Spectral {
        values,
        vectors,
        derivative,
    }
}

pub fn sld(rho: &DensityState, drho: &Mat2, tol: f64) -> SldOperator {
    let s = spectral(rho, drho);
    let local = Mat2::from_fn(|i, j| {
        let denom = s.values[i] + s.values[j];
        if denom > tol {
            s.derivative[(i, j)] * c(2.0 / denom)
        } else {
            c(0.0)
        }
    });
    let matrix = s.vectors * local * s.vectors.adjoint();
    SldOperator {
        matrix: (matrix + matrix.adjoint()) * c(0.5),
        rank_tolerance: tol,
    }
}

/// `Tr(ρ L²)` with the default rank tolerance.
pub fn qfi(rho: &DensityState, drho: &Mat2) -> f64 {
    qfi_with_tolerance(rho, drho, DEFAULT_RANK_TOLERANCE)
}

pub fn qfi_with_tolerance(rho: &DensityState, drho: &Mat2, tol: f64) -> f64 {
    let l = sld(rho, drho, tol).matrix;
    trace_real(&(rho.matrix() * l * l)).max(0.0)
}

/// QFI that stays continuous where the rank of ρ changes.
///
/// On the kernel of ρ the SLD carries no information, yet the family
/// `ρ(x)` can still leave the boundary of state space at second order. Each
/// zero eigenvalue contributes `2∂ₓ²λ`, where
/// `∂ₓ²λ_i = ⟨i|∂ₓ²ρ|i⟩ + 2Σ_{j≠i}|⟨j|∂ₓρ|i⟩|²/(λ_i − λ_j)`. At full rank this
/// equals [`qfi`].
pub fn qfi_with_curvature(rho: &DensityState, drho: &Mat2, d2rho: &Mat2, tol: f64) -> f64 {
    let base = qfi_with_tolerance(rho, drho, tol);
    let s = spectral(rho, drho);
    let second = s.vectors.adjoint() * d2rho * s.vectors;
    let mut extra = 0.0;
    for i in 0..2 {
        if 2.0 * s.values[i] > tol {
            continue;
        }
        let mut curvature = second[(i, i)].re;
        for j in 0..2 {
            if j != i && 2.0 * s.values[j] > tol {
                curvature += 2.0 * s.derivative[(j, i)].norm_sqr() / (s.values[i] - s.values[j]);
            }
        }
        extra += 2.0 * curvature.max(0.0);
    }
    base + extra
}

/// `|∂r|² + (r·∂r)²/(1 − |r|²)`; on the surface of the ball the pure-state
/// value `|∂r|²` is returned and `r·∂r` must vanish.
pub fn qfi_bloch(r: &BlochVector, dr: &[f64; 3]) -> Result<f64> {
    let dr2 = dr.iter().map(|v| v * v).sum::<f64>();
    let along = r.dot(dr);
    if (1.0 - r.norm()).abs() <= 1e-9 {
        if along.abs() > 1e-8 {
            return Err(Error::InconsistentInput(along));
        }
        return Ok(dr2);
    }
    Ok(dr2 + along * along / (1.0 - r.norm_sqr()))
}

fn outcome_data(rho: &DensityState, drho: &Mat2, povm: &Povm) -> Vec<(f64, f64)> {
    povm.effects()
        .iter()
        .map(|e| (trace_real(&(rho.matrix() * e)), trace_real(&(drho * e))))
        .collect()
}

/// `Σ_y (∂ₓp_y)²/p_y`; outcomes with vanishing probability and derivative
/// contribute nothing.
pub fn cfi(rho: &DensityState, drho: &Mat2, povm: &Povm) -> Result<f64> {
    let mut total = 0.0;
    for (y, (p, dp)) in outcome_data(rho, drho, povm).into_iter().enumerate() {
        if p < PROBABILITY_FLOOR {
            if dp.abs() >= SINGULAR_DERIVATIVE {
                return Err(Error::SingularOutcome {
                    outcome: y,
                    derivative: dp,
                });
            }
            continue;
        }
        total += dp * dp / p;
    }
    Ok(total)
}

/// CFI continuous across vanishing outcome probabilities: an outcome with
/// `p_y = ∂ₓp_y = 0` contributes the limit `2∂ₓ²p_y`.
pub fn cfi_with_curvature(rho: &DensityState, drho: &Mat2, d2rho: &Mat2, povm: &Povm) -> Result<f64> {
    let mut total = 0.0;
    for (y, (p, dp)) in outcome_data(rho, drho, povm).into_iter().enumerate() {
        if p < PROBABILITY_FLOOR {
            if dp.abs() >= SINGULAR_DERIVATIVE {
                return Err(Error::SingularOutcome {
                    outcome: y,
                    derivative: dp,
                });
            }
            total += 2.0 * trace_real(&(d2rho * povm.effects()[y])).max(0.0);
            continue;
        }
        total += dp * dp / p;
    }
    Ok(total)
}

/// `(L̃₁, L̃₂) = (Σ_y (∂ₓ ln p_y) E_y, Σ_y (∂ₓ ln p_y)² E_y)`.
pub fn classical_weights(rho: &DensityState, drho: &Mat2, povm: &Povm) -> Result<(Mat2, Mat2)> {
    let mut l1 = Mat2::zeros();
    let mut l2 = Mat2::zeros();
    for (y, (p, dp)) in outcome_data(rho, drho, povm).into_iter().enumerate() {
        if p < PROBABILITY_FLOOR {
            if dp.abs() >= SINGULAR_DERIVATIVE {
                return Err(Error::SingularOutcome {
                    outcome: y,
                    derivative: dp,
                });
            }
            continue;
        }
        let score = dp / p;
        l1 += povm.effects()[y] * c(score);
        l2 += povm.effects()[y] * c(score * score);
    }
    Ok((l1, l2))
}

/// `∂ₓρ(T)` of the discretized evolution.
pub fn terminal_derivative(traj: &Trajectory) -> Mat2 {
    *traj
        .state_derivatives()
        .last()
        .expect("trajectory holds the initial state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{density_from_bloch, from_pauli_components};
    use crate::linalg::{sigma_y, sigma_z, C64, I};

    #[test]
    fn diagonal_sld() {
        let (p, q) = (0.3, 0.12);
        let rho = DensityState::new(Mat2::new(c(p), c(0.0), c(0.0), c(1.0 - p))).unwrap();
        let drho = Mat2::new(c(q), c(0.0), c(0.0), c(-q));
        let l = sld(&rho, &drho, DEFAULT_RANK_TOLERANCE).matrix;
        assert!((l[(0, 0)].re - q / p).abs() < 1e-14);
        assert!((l[(1, 1)].re + q / (1.0 - p)).abs() < 1e-14);
        assert!(l[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn pure_unitary_family_gives_t_squared() {
        let t = 2.5;
        let rho = DensityState::plus();
        // ∂ω ρ = −i t [½σ₃, ρ]
        let h = sigma_z() * c(0.5);
        let drho = (h * rho.matrix() - rho.matrix() * h) * (-I * t);
        assert!((qfi(&rho, &drho) - t * t).abs() < 1e-12);
    }

    #[test]
    fn zero_derivative_has_no_information() {
        assert_eq!(qfi(&DensityState::plus(), &Mat2::zeros()), 0.0);
    }

    #[test]
    fn qfi_bloch_pure_limit() {
        let r = BlochVector::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(qfi_bloch(&r, &[0.0, 2.0, 0.0]).unwrap(), 4.0);
        assert!(matches!(
            qfi_bloch(&r, &[0.5, 2.0, 0.0]),
            Err(Error::InconsistentInput(_))
        ));
        assert_eq!(qfi_bloch(&r, &[0.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn qfi_bloch_matches_free_parallel_dephasing() {
        let (gamma, w, t): (f64, f64, f64) = (0.1, 1.0, 7.0);
        let e = (-gamma * t).exp();
        let r = BlochVector::new(e * (w * t).cos(), -e * (w * t).sin(), 0.0).unwrap();
        let dr = [-e * t * (w * t).sin(), -e * t * (w * t).cos(), 0.0];
        let f = qfi_bloch(&r, &dr).unwrap();
        assert!((f - t * t * (-2.0 * gamma * t).exp()).abs() < 1e-12);
    }

    #[test]
    fn trivial_povm_has_no_information() {
        let rho = density_from_bloch(&BlochVector::new(0.2, 0.3, 0.1).unwrap()).unwrap();
        let drho = from_pauli_components(&[0.5, -0.2, 0.1]) * c(0.5);
        assert_eq!(cfi(&rho, &drho, &Povm::trivial()).unwrap(), 0.0);
    }

    #[test]
    fn singular_outcome_is_reported() {
        let rho = DensityState::plus();
        let drho = from_pauli_components(&[-0.1, 0.0, 0.0]) * c(0.5);
        assert!(matches!(
            cfi(&rho, &drho, &Povm::plus_minus()),
            Err(Error::SingularOutcome { outcome: 1, .. })
        ));
        let tangent = sigma_y() * c(0.5);
        assert_eq!(cfi(&rho, &tangent, &Povm::plus_minus()).unwrap(), 0.0);
    }

    #[test]
    fn curvature_term_restores_the_limit() {
        // r(δ) = (1 − aδ², bδ, 0): limits of the SLD and classical values are 2a.
        let (a, b) = (0.7, 0.4);
        let rho = DensityState::plus();
        let drho = from_pauli_components(&[0.0, b, 0.0]) * c(0.5);
        let d2rho = from_pauli_components(&[-2.0 * a, 0.0, 0.0]) * c(0.5);
        assert!((qfi(&rho, &drho) - b * b).abs() < 1e-12);
        let f = qfi_with_curvature(&rho, &drho, &d2rho, DEFAULT_RANK_TOLERANCE);
        assert!((f - 2.0 * a).abs() < 1e-12, "{f}");
        let fc = cfi_with_curvature(&rho, &drho, &d2rho, &Povm::plus_minus()).unwrap();
        assert!((fc - 2.0 * a).abs() < 1e-12, "{fc}");

        let delta = 1e-4;
        let r = BlochVector::new(1.0 - a * delta * delta, b * delta, 0.0).unwrap();
        let near = qfi_bloch(&r, &[-2.0 * a * delta, b, 0.0]).unwrap();
        assert!((near - 2.0 * a).abs() < 1e-4);
    }

    #[test]
    fn curvature_is_inert_at_full_rank() {
        let rho = density_from_bloch(&BlochVector::new(0.3, 0.1, -0.2).unwrap()).unwrap();
        let drho = from_pauli_components(&[0.2, 0.5, -0.1]) * c(0.5);
        let d2rho = from_pauli_components(&[1.0, 0.0, 0.3]) * c(0.5);
        let f = qfi(&rho, &drho);
        assert_eq!(qfi_with_curvature(&rho, &drho, &d2rho, DEFAULT_RANK_TOLERANCE), f);
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(vec![Mat2::identity() * c(0.5)]).is_err());
        assert!(Povm::new(vec![]).is_err());
        let bad = Mat2::new(c(1.5), c(0.0), c(0.0), c(0.0));
        let other = Mat2::new(c(-0.5), c(0.0), c(0.0), c(1.0));
        assert!(Povm::new(vec![bad, other]).is_err());
        let _ = C64::new(0.0, 0.0);
    }
}
