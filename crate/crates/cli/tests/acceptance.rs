//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run all with `cargo test -p qgrape-cli --test acceptance`, or a subset by
//! number: `cargo test -p qgrape-cli --test acceptance -- 5 9`.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qgrape_cli::energy_cost;
use qgrape_core::dynamics::{density_from_bloch, from_pauli_components};
use qgrape_core::fisher::{cfi, qfi};
use qgrape_core::grape::{finite_difference_gradient, gradient, objective_of, GradientMethod, InitMode, UpdateRule};
use qgrape_core::linalg::{c, Mat2};
use qgrape_core::oracles::{
    best_pulse_time, parallel_free_qfi, parallel_single_pulse_qfi,
    transverse_controlled_qfi, SinglePulsePlan,
};
use qgrape_core::{
    ascend, propagate, AscentConfig, BlochVector, ControlGrid, DensityState, EstimationProblem, NoiseModel,
    Objective, Povm,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn qubit(omega: f64, noise: NoiseModel, horizon: f64) -> EstimationProblem {
    EstimationProblem::qubit(omega, noise, DensityState::plus(), horizon).unwrap()
}

fn constant_v3(horizon: f64, dt: f64, v3: f64) -> ControlGrid {
    let m = ControlGrid::steps_for(horizon, dt).unwrap();
    ControlGrid::from_fn(m, 3, dt, |_, k| if k == 2 { v3 } else { 0.0 }).unwrap()
}

fn free_grid(horizon: f64, dt: f64) -> ControlGrid {
    ControlGrid::zeros(ControlGrid::steps_for(horizon, dt).unwrap(), 3, dt).unwrap()
}

fn random_init(scale: f64) -> InitMode {
    InitMode::RandomUniform {
        low: -scale,
        high: scale,
    }
}

/// Adam ascent, rate 0.1, Δt = 0.05, seed 0.
fn optimize(problem: &EstimationProblem, init: InitMode, iterations: usize, objective: &Objective) -> ControlGrid {
    let config = AscentConfig {
        step_size: 0.1,
        max_iterations: iterations,
        init,
        update: UpdateRule::adam(),
        ..AscentConfig::default()
    };
    let report = ascend(problem, &config, objective).unwrap();
    assert!(report.error.is_none(), "{:?}", report.error);
    report.final_grid
}

fn qfi_of(problem: &EstimationProblem, grid: &ControlGrid) -> f64 {
    objective_of(problem, grid, &Objective::Qfi).unwrap()
}

/// QFI at every `every`-th step of one trajectory, with its time.
fn qfi_curve(problem: &EstimationProblem, dt: f64, every: usize) -> Vec<(f64, f64)> {
    let traj = propagate(problem, &free_grid(problem.horizon, dt)).unwrap();
    traj.states()
        .iter()
        .zip(traj.state_derivatives())
        .enumerate()
        .skip(every)
        .step_by(every)
        .map(|(j, (rho, drho))| (j as f64 * dt, qfi(rho, drho)))
        .collect()
}

fn argmax(curve: &[(f64, f64)]) -> f64 {
    curve.iter().fold((0.0, f64::NEG_INFINITY), |b, &p| if p.1 > b.1 { p } else { b }).0
}

fn criterion_1() -> Outcome {
    let gamma = 0.1;
    let mut worst = 0.0f64;
    let mut at5 = 0.0;
    for t in [1.0, 5.0, 10.0, 20.0] {
        let problem = qubit(1.0, NoiseModel::transverse_dephasing(gamma), t);
        let f = qfi_of(&problem, &constant_v3(t, 1e-3, -0.5));
        let closed = 2.0 / (gamma * gamma) * ((-gamma * t).exp() + gamma * t - 1.0);
        worst = worst.max(rel(f, closed));
        if t == 5.0 {
            at5 = f;
        }
    }
    outcome(
        worst <= 1e-3 && (at5 - 21.306).abs() < 5e-4,
        format!("F(5) = {at5:.6}, worst relative error {worst:.2e} (tol 1e-3)"),
    )
}

fn criterion_2() -> Outcome {
    let gamma = 0.1;
    let dt = 1e-3;
    let cell = 0.5;
    let problem = qubit(1.0, NoiseModel::parallel_dephasing(gamma), 30.0);
    let curve = qfi_curve(&problem, dt, (cell / dt).round() as usize);
    let mut worst = 0.0f64;
    for t in [2.0, 10.0, 20.0] {
        let &(_, f) = curve.iter().find(|(s, _)| (s - t).abs() < 1e-9).unwrap();
        worst = worst.max(rel(f, t * t * (-2.0 * gamma * t).exp()));
    }
    let peak = argmax(&curve);
    outcome(
        worst <= 1e-3 && (peak - 1.0 / gamma).abs() <= cell + 1e-9,
        format!("worst relative error {worst:.2e} (tol 1e-3), argmax t = {peak} (expect 10 ± {cell})"),
    )
}

fn criterion_3() -> Outcome {
    let gamma = 0.1;
    let dt = 1e-3;
    let cell = 0.5;
    let problem = qubit(1.0, NoiseModel::decay(gamma), 40.0);
    let curve = qfi_curve(&problem, dt, (cell / dt).round() as usize);
    let mut worst = 0.0f64;
    for t in [2.0, 10.0, 20.0, 30.0] {
        let &(_, f) = curve.iter().find(|(s, _)| (s - t).abs() < 1e-9).unwrap();
        worst = worst.max(rel(f, t * t * (-gamma * t).exp()));
    }
    let peak = argmax(&curve);
    outcome(
        worst <= 1e-3 && (peak - 2.0 / gamma).abs() <= cell + 1e-9,
        format!("worst relative error {worst:.2e} (tol 1e-3), argmax T = {peak} (expect 20 ± {cell})"),
    )
}

fn criterion_4() -> Outcome {
    let noises = [
        ("none", NoiseModel::None),
        ("parallel", NoiseModel::parallel_dephasing(0.1)),
        ("transverse", NoiseModel::transverse_dephasing(0.1)),
        (
            "tilted",
            NoiseModel::Dephasing {
                theta: 1.1,
                phi: 0.4,
                gamma: 0.15,
            },
        ),
        (
            "spontaneous",
            NoiseModel::SpontaneousEmission {
                gamma_plus: 0.02,
                gamma_minus: 0.1,
            },
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0usize;
    let mut failures = Vec::new();
    let mut worst_abs = 0.0f64;
    for (name, noise) in noises {
        let problem = qubit(1.0, noise, 2.0);
        for s in 0..20 {
            let grid = ControlGrid::from_fn(40, 3, 0.05, |_, _| rng.random_range(-1.0..1.0)).unwrap();
            let traj = propagate(&problem, &grid).unwrap();
            for objective in [Objective::Qfi, Objective::Cfi(Povm::plus_minus())] {
                let analytic = gradient(&traj, &problem, &objective, GradientMethod::Exact).unwrap();
                let fd = finite_difference_gradient(&problem, &grid, &objective, 1e-5).unwrap();
                for (a, b) in analytic.values().iter().zip(fd.values()) {
                    checked += 1;
                    let diff = (a - b).abs();
                    worst_abs = worst_abs.max(diff);
                    if diff > 1e-6 && diff > 1e-2 * b.abs() {
                        failures.push(format!("{name} schedule {s}: {a} vs {b}"));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} entries over 5 noise models x 20 schedules x (QFI, CFI); {} outside tolerance; largest |diff| {worst_abs:.1e}{}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn criterion_5() -> Outcome {
    let problem = qubit(1.0, NoiseModel::transverse_dephasing(0.1), 5.0);
    let config = AscentConfig {
        step_size: 0.1,
        max_iterations: 1000,
        init: random_init(1.0),
        update: UpdateRule::adam(),
        ..AscentConfig::default()
    };
    let report = ascend(&problem, &config, &Objective::Qfi).unwrap();
    let f = report.final_objective().unwrap();
    let target = 0.95 * 21.306;
    outcome(
        f >= target && report.iterations_used <= 1000 && report.error.is_none(),
        format!(
            "QFI {:.4} -> {f:.4} in {} iterations (need >= {target:.4}; {:.1}% of 21.306)",
            report.objective_history[0],
            report.iterations_used,
            100.0 * f / 21.306
        ),
    )
}

fn criterion_6() -> Outcome {
    let gamma = 0.1;
    let mut pipeline = Vec::new();
    let mut closed = Vec::new();
    for t in 1..=30 {
        let t = t as f64;
        let problem = qubit(1.0, NoiseModel::transverse_dephasing(gamma), t);
        pipeline.push(qfi_of(&problem, &constant_v3(t, 0.01, -0.5)));
        closed.push(transverse_controlled_qfi(gamma, t).unwrap());
    }
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    let min_step = pipeline.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let worst = pipeline.iter().zip(&closed).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
    outcome(
        increasing(&pipeline) && increasing(&closed),
        format!(
            "T = 1..30: F from {:.4} to {:.3}, smallest increment {min_step:.4}; pipeline vs closed form within {worst:.1e}",
            pipeline[0], pipeline[29]
        ),
    )
}

fn criterion_7() -> Outcome {
    let (gamma, horizon) = (0.1, 5.0);
    let thetas: Vec<f64> = (0..11).map(|i| PI * i as f64 / 10.0).collect();
    let ratios: Vec<f64> = thetas
        .iter()
        .map(|&theta| {
            let problem = qubit(1.0, NoiseModel::Dephasing { theta, phi: 0.0, gamma }, horizon);
            let free = qfi_of(&problem, &free_grid(horizon, 0.05));
            let grid = optimize(&problem, InitMode::Zero, 200, &Objective::Qfi);
            qfi_of(&problem, &grid) / free
        })
        .collect();
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    // θ = π is the same dephasing axis as θ = 0, so the two tie.
    let top = ratios[5] >= max && ratios.iter().enumerate().all(|(i, r)| i == 5 || *r < ratios[5]);
    let bottom = ratios[0] <= min * (1.0 + 1e-12);
    let listing: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    outcome(
        top && bottom,
        format!("ratios over θ = 0..π: [{}]", listing.join(", ")),
    )
}

fn criterion_8() -> Outcome {
    let gamma = 0.1;
    let best = |t: f64| {
        best_pulse_time(t, 1501, |t0| parallel_single_pulse_qfi(&SinglePulsePlan::parallel(gamma, 1.0, t0, t)))
            .unwrap()
    };
    let (t15, f15) = best(15.0);
    let (t5, f5) = best(5.0);
    let (free15, free5) = (parallel_free_qfi(gamma, 15.0).unwrap(), parallel_free_qfi(gamma, 5.0).unwrap());
    outcome(
        f15 > free15 && f5 <= free5,
        format!(
            "T = 15: best pulse {f15:.4} at t0 = {t15:.2} vs free {free15:.4}; T = 5: best {f5:.4} at t0 = {t5:.2} vs free {free5:.4}"
        ),
    )
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    let a: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    [s * a.cos(), s * a.sin(), z]
}

fn random_povm(rng: &mut ChaCha8Rng) -> Povm {
    if rng.random_bool(0.5) {
        let n = random_unit(rng);
        let sharp: f64 = rng.random_range(0.0..1.0);
        let e = (Mat2::identity() + from_pauli_components(&n) * c(sharp)) * c(0.5);
        Povm::new(vec![e, Mat2::identity() - e]).unwrap()
    } else {
        // Trine in the plane spanned by two orthonormal vectors.
        let (a, b) = (random_unit(rng), random_unit(rng));
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let mut v = [b[0] - dot * a[0], b[1] - dot * a[1], b[2] - dot * a[2]];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let effects = (0..3)
            .map(|k| {
                let ang = 2.0 * PI * k as f64 / 3.0;
                let n = [0, 1, 2].map(|i| ang.cos() * a[i] + ang.sin() * v[i]);
                (Mat2::identity() + from_pauli_components(&n)) * c(1.0 / 3.0)
            })
            .collect();
        Povm::new(effects).unwrap()
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    let mut largest_gap = f64::NEG_INFINITY;
    for _ in 0..200 {
        let len: f64 = rng.random_range(0.0..0.999);
        let dir = random_unit(&mut rng);
        let r = BlochVector::new(len * dir[0], len * dir[1], len * dir[2]).unwrap();
        let rho = density_from_bloch(&r).unwrap();
        let dr = [0; 3].map(|_| rng.random_range(-2.0..2.0));
        let drho = from_pauli_components(&dr) * c(0.5);
        let povm = random_povm(&mut rng);
        let gap = cfi(&rho, &drho, &povm).unwrap() - qfi(&rho, &drho);
        largest_gap = largest_gap.max(gap);
        if gap > 1e-9 {
            violations += 1;
        }
    }

    let problem = qubit(1.0, NoiseModel::transverse_dephasing(0.1), 5.0);
    let measurement = Objective::Cfi(Povm::plus_minus());
    let exact = constant_v3(5.0, 0.05, -0.5);
    let cfi_at_optimum = objective_of(&problem, &exact, &measurement).unwrap();
    let grid = optimize(&problem, random_init(1.0), 1000, &measurement);
    let cfi_opt = objective_of(&problem, &grid, &measurement).unwrap();
    let qfi_opt = qfi_of(&problem, &grid);
    let closed = transverse_controlled_qfi(0.1, 5.0).unwrap();
    let saturates = cfi_opt >= 0.98 * qfi_opt && rel(cfi_at_optimum, closed) <= 0.02;
    outcome(
        violations == 0 && saturates,
        format!(
            "200 triples, {violations} with cfi > qfi + 1e-9 (max cfi - qfi {largest_gap:.1e}); \
             CFI at the exact optimum {cfi_at_optimum:.4} vs QFI {closed:.4}; \
             optimized CFI {cfi_opt:.4} = {:.2}% of the QFI of its controls ({qfi_opt:.4}), {:.1}% of the closed form",
            100.0 * cfi_opt / qfi_opt,
            100.0 * cfi_opt / closed
        ),
    )
}

fn criterion_10() -> Outcome {
    let (gamma, horizon) = (0.2, 20.0);
    let design = |w: f64| qubit(w, NoiseModel::transverse_dephasing(gamma), horizon);
    let truth = design(1.0);
    let free = qfi_of(&truth, &free_grid(horizon, 0.05));
    let matched = qfi_of(&truth, &optimize(&truth, random_init(1.0), 300, &Objective::Qfi));
    let grid: Vec<f64> = (0..9).map(|i| 0.8 + 0.05 * i as f64).collect();
    let mismatched: Vec<f64> = grid
        .iter()
        .map(|&w| qfi_of(&truth, &optimize(&design(w), InitMode::Zero, 100, &Objective::Qfi)))
        .collect();
    let worst = mismatched.iter().cloned().fold(f64::INFINITY, f64::min);
    let listing: Vec<String> = mismatched.iter().map(|v| format!("{v:.2}")).collect();
    outcome(
        matched >= 10.0 * free && worst > free,
        format!(
            "uncontrolled {free:.4}; matched design {matched:.3} ({:.1}x); ω̂ = 0.80..1.20 evaluated at ω = 1: [{}]",
            matched / free,
            listing.join(", ")
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut worst = 0.0f64;
    for gamma in [0.05, 0.1, 0.2] {
        for t in [1.0, 5.0, 10.0, 20.0, 30.0] {
            let optimum = constant_v3(t, 0.05, -0.5);
            // Confirm this is the controlled optimum for this rate.
            let problem = qubit(1.0, NoiseModel::transverse_dephasing(gamma), t);
            let f = qfi_of(&problem, &optimum);
            assert!(rel(f, transverse_controlled_qfi(gamma, t).unwrap()) < 1e-9);
            let &(end, e) = energy_cost(&optimum).last().unwrap();
            assert!((end - t).abs() < 1e-9);
            worst = worst.max((e - 0.25 * t).abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut monotone = true;
    for _ in 0..100 {
        let m = rng.random_range(1..300);
        let dt = rng.random_range(0.001..0.2);
        let grid = ControlGrid::from_fn(m, 3, dt, |_, _| rng.random_range(-3.0..3.0)).unwrap();
        let e = energy_cost(&grid);
        monotone &= e[0] == (0.0, 0.0) && e.windows(2).all(|w| w[1].1 >= w[0].1 && w[1].0 > w[0].0);
    }
    outcome(
        worst <= 1e-9 && monotone,
        format!("max |E(T) - 0.25T| = {worst:.1e} over 3 rates x 5 horizons; 100 random schedules monotone: {monotone}"),
    )
}

fn criterion_12() -> Outcome {
    let gamma = 0.1;
    let horizons = [2.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0];
    let mut free_best = f64::NEG_INFINITY;
    let mut opt_best = f64::NEG_INFINITY;
    let mut listing = Vec::new();
    for t in horizons {
        let problem = qubit(1.0, NoiseModel::parallel_dephasing(gamma), t);
        let free = qfi_of(&problem, &free_grid(t, 0.05)) / t;
        // Zero controls are stationary here by symmetry, so also start at random.
        let opt = [InitMode::Zero, random_init(1.0)]
            .into_iter()
            .map(|init| qfi_of(&problem, &optimize(&problem, init, 200, &Objective::Qfi)) / t)
            .fold(f64::NEG_INFINITY, f64::max);
        free_best = free_best.max(free);
        opt_best = opt_best.max(opt);
        listing.push(format!("T={t}: {free:.3}/{opt:.3}"));
    }
    outcome(
        opt_best <= 1.05 * free_best,
        format!(
            "max F/T uncontrolled {free_best:.4}, optimized {opt_best:.4} (limit {:.4}); free/optimized: {}",
            1.05 * free_best,
            listing.join(" ")
        ),
    )
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 12] = [
        (1, "transverse closed form", criterion_1),
        (2, "uncontrolled parallel dephasing", criterion_2),
        (3, "uncontrolled spontaneous emission", criterion_3),
        (4, "gradient oracle", criterion_4),
        (5, "GRAPE recovers the transverse optimum", criterion_5),
        (6, "controlled transverse QFI increases with T", criterion_6),
        (7, "theta ordering of the enhancement", criterion_7),
        (8, "single-pulse parallel strategy", criterion_8),
        (9, "CFI <= QFI and CFI saturation", criterion_9),
        (10, "robustness to the design frequency", criterion_10),
        (11, "energy cost", criterion_11),
        (12, "normalized QFI null result", criterion_12),
    ];
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = Vec::new();
    for (n, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let clock = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {n:2} {} | {name} | {} | {:.1}s",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            clock.elapsed().as_secs_f64()
        );
        if !result.pass {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
