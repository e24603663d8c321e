//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every exported function returns a JSON string. The plain Rust functions
//! underneath are what the native tests exercise.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qgrape_core::grape::{ascend, AscentConfig, InitMode, Objective, UpdateRule};
use qgrape_core::oracles::{
    best_pulse_time, parallel_free_qfi, parallel_single_pulse_qfi, spontaneous_free_qfi,
    spontaneous_single_pulse_qfi, transverse_controlled_qfi, SinglePulsePlan,
};
use qgrape_core::{DensityState, EstimationProblem, NoiseModel};

const DT: f64 = 0.05;

#[derive(Debug, Serialize)]
pub struct HorizonCurves {
    pub t: Vec<f64>,
    pub transverse_controlled: Vec<f64>,
    pub parallel_free: Vec<f64>,
    pub spontaneous_free: Vec<f64>,
    pub unitary: Vec<f64>,
}

/// Closed-form QFI against the horizon on `points` evenly spaced times in `[0, t_max]`.
pub fn horizon_curves(gamma: f64, t_max: f64, points: usize) -> Result<HorizonCurves, String> {
    if points < 2 || points > 10_000 {
        return Err("points must lie in [2, 10000]".into());
    }
    let mut out = HorizonCurves {
        t: Vec::with_capacity(points),
        transverse_controlled: Vec::with_capacity(points),
        parallel_free: Vec::with_capacity(points),
        spontaneous_free: Vec::with_capacity(points),
        unitary: Vec::with_capacity(points),
    };
    for i in 0..points {
        let t = t_max * i as f64 / (points - 1) as f64;
        out.t.push(t);
        out.transverse_controlled.push(transverse_controlled_qfi(gamma, t).map_err(|e| e.to_string())?);
        out.parallel_free.push(parallel_free_qfi(gamma, t).map_err(|e| e.to_string())?);
        out.spontaneous_free.push(spontaneous_free_qfi(0.0, gamma, t).map_err(|e| e.to_string())?);
        out.unitary.push(t * t);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct PulseScan {
    pub t0: Vec<f64>,
    pub qfi: Vec<f64>,
    /// QFI without the pulse.
    pub free: f64,
    pub best_t0: f64,
    pub best_qfi: f64,
}

/// QFI of a single pulse at each `t0` in `[0, T]`. `model` is `parallel` or `spontaneous`.
pub fn pulse_scan(model: &str, gamma: f64, omega0: f64, horizon: f64, points: usize) -> Result<PulseScan, String> {
    if points < 2 || points > 10_000 {
        return Err("points must lie in [2, 10000]".into());
    }
    let (free, f): (f64, Box<dyn Fn(f64) -> qgrape_core::Result<f64>>) = match model {
        "parallel" => (
            parallel_free_qfi(gamma, horizon).map_err(|e| e.to_string())?,
            Box::new(move |t0| parallel_single_pulse_qfi(&SinglePulsePlan::parallel(gamma, omega0, t0, horizon))),
        ),
        "spontaneous" => (
            spontaneous_free_qfi(0.0, gamma, horizon).map_err(|e| e.to_string())?,
            Box::new(move |t0| {
                spontaneous_single_pulse_qfi(&SinglePulsePlan::spontaneous(gamma, omega0, t0, horizon))
            }),
        ),
        other => return Err(format!("unknown pulse model `{other}`")),
    };
    let mut t0s = Vec::with_capacity(points);
    let mut qfi = Vec::with_capacity(points);
    let (best_t0, best_qfi) = best_pulse_time(horizon, points, |t0| {
        let v = f(t0)?;
        t0s.push(t0);
        qfi.push(v);
        Ok(v)
    })
    .map_err(|e| e.to_string())?;
    Ok(PulseScan {
        t0: t0s,
        qfi,
        free,
        best_t0,
        best_qfi,
    })
}

#[derive(Debug, Serialize)]
pub struct Optimized {
    pub history: Vec<f64>,
    pub t: Vec<f64>,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub v3: Vec<f64>,
    pub qfi: f64,
    /// Closed-form optimum for transverse dephasing, `null` otherwise.
    pub bound: Option<f64>,
    pub error: Option<String>,
}

/// Adam ascent on the QFI for the `|+⟩` probe. `noise` is `transverse`,
/// `parallel` or `spontaneous`.
pub fn optimize(
    noise: &str,
    gamma: f64,
    omega0: f64,
    horizon: f64,
    iterations: usize,
    seed: u64,
) -> Result<Optimized, String> {
    let model = match noise {
        "transverse" => NoiseModel::transverse_dephasing(gamma),
        "parallel" => NoiseModel::parallel_dephasing(gamma),
        "spontaneous" => NoiseModel::decay(gamma),
        other => return Err(format!("unknown noise `{other}`")),
    };
    if iterations == 0 || iterations > 5000 {
        return Err("iterations must lie in [1, 5000]".into());
    }
    let problem =
        EstimationProblem::qubit(omega0, model, DensityState::plus(), horizon).map_err(|e| e.to_string())?;
    let config = AscentConfig {
        step_size: 0.1,
        max_iterations: iterations,
        seed,
        init: InitMode::RandomUniform {
            low: -omega0.abs(),
            high: omega0.abs(),
        },
        dt: DT,
        update: UpdateRule::adam(),
        ..AscentConfig::default()
    };
    let report = ascend(&problem, &config, &Objective::Qfi).map_err(|e| e.to_string())?;
    let g = &report.final_grid;
    let column = |k: usize| (0..g.steps()).map(|j| g.get(j, k)).collect::<Vec<_>>();
    Ok(Optimized {
        t: (0..g.steps()).map(|j| j as f64 * g.dt()).collect(),
        v1: column(0),
        v2: column(1),
        v3: column(2),
        qfi: report.final_objective().unwrap_or(f64::NAN),
        bound: match noise {
            "transverse" => transverse_controlled_qfi(gamma, horizon).ok(),
            _ => None,
        },
        error: report.error.as_ref().map(|e| e.to_string()),
        history: report.objective_history,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = horizonCurves)]
pub fn horizon_curves_js(gamma: f64, t_max: f64, points: usize) -> Result<String, JsValue> {
    to_js(horizon_curves(gamma, t_max, points))
}

#[wasm_bindgen(js_name = pulseScan)]
pub fn pulse_scan_js(model: &str, gamma: f64, omega0: f64, horizon: f64, points: usize) -> Result<String, JsValue> {
    to_js(pulse_scan(model, gamma, omega0, horizon, points))
}

#[wasm_bindgen(js_name = optimize)]
pub fn optimize_js(
    noise: &str,
    gamma: f64,
    omega0: f64,
    horizon: f64,
    iterations: usize,
    seed: u32,
) -> Result<String, JsValue> {
    to_js(optimize(noise, gamma, omega0, horizon, iterations, seed as u64))
}
