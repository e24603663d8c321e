//! Scenario configuration: flat `key = value` files with `#` comments.
//!
//! Every key has a default except `omega_true`, which must be given so that
//! the unit of time is never implicit.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use qgrape_core::dynamics::density_from_bloch;
use qgrape_core::grape::{GradientMethod, InitMode, Objective, UpdateRule};
use qgrape_core::{AscentConfig, BlochVector, DensityState, NoiseModel, Povm};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("`{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Dephasing,
    Spontaneous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

impl NoiseSpec {
    pub fn model(&self) -> NoiseModel {
        match self.kind {
            NoiseKind::None => NoiseModel::None,
            NoiseKind::Dephasing => NoiseModel::Dephasing {
                theta: self.theta,
                phi: self.phi,
                gamma: self.gamma,
            },
            NoiseKind::Spontaneous => NoiseModel::SpontaneousEmission {
                gamma_plus: self.gamma_plus,
                gamma_minus: self.gamma_minus,
            },
        }
    }

    pub fn is_parallel(&self) -> bool {
        self.kind == NoiseKind::Dephasing && self.theta == 0.0
    }

    pub fn is_transverse(&self) -> bool {
        self.kind == NoiseKind::Dephasing && self.theta == PI / 2.0 && self.phi == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeSpec {
    Zero,
    Plus,
    Bloch([f64; 3]),
}

impl ProbeSpec {
    pub fn state(&self) -> DensityState {
        match self {
            ProbeSpec::Zero => DensityState::zero(),
            ProbeSpec::Plus => DensityState::plus(),
            ProbeSpec::Bloch(r) => {
                // Checked at parse time.
                density_from_bloch(&BlochVector::from_array(*r).expect("validated Bloch vector"))
                    .expect("validated Bloch vector")
            }
        }
    }

    fn render(&self) -> String {
        match self {
            ProbeSpec::Zero => "zero".into(),
            ProbeSpec::Plus => "plus".into(),
            ProbeSpec::Bloch(r) => r.iter().map(|v| render_f64(*v)).collect::<Vec<_>>().join(", "),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Qfi,
    Cfi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PovmSpec {
    PlusMinus,
    Computational,
}

impl PovmSpec {
    pub fn povm(&self) -> Povm {
        match self {
            PovmSpec::PlusMinus => Povm::plus_minus(),
            PovmSpec::Computational => Povm::computational(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            PovmSpec::PlusMinus => "plus_minus",
            PovmSpec::Computational => "computational",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    Zero,
    Random,
    Schedule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentSpec {
    pub step_size: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub init: InitKind,
    /// Random amplitudes are drawn from `[init_low, init_high]·ω̂₀`.
    pub init_low: f64,
    pub init_high: f64,
    pub backtracking: bool,
    pub update: UpdateRule,
    pub method: GradientMethod,
    /// Schedule file for `init = schedule`.
    pub schedule: Option<PathBuf>,
}

impl Default for AscentSpec {
    fn default() -> Self {
        let d = AscentConfig::default();
        Self {
            step_size: d.step_size,
            max_iterations: d.max_iterations,
            tolerance: d.tolerance,
            seed: d.seed,
            init: InitKind::Random,
            init_low: -1.0,
            init_high: 1.0,
            backtracking: d.backtracking,
            update: d.update,
            method: d.method,
            schedule: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Theta,
    Horizon,
    OmegaHat,
    OmegaTrue,
    T0,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Theta => "theta",
            SweepAxis::Horizon => "horizon",
            SweepAxis::OmegaHat => "omega_hat",
            SweepAxis::OmegaTrue => "omega_true",
            SweepAxis::T0 => "t0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseModel {
    Parallel,
    Spontaneous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub pulse_model: Option<PulseModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub noise: NoiseSpec,
    pub omega_true: f64,
    pub omega_hat: f64,
    pub probe: ProbeSpec,
    pub horizon: f64,
    pub dt: f64,
    pub objective: ObjectiveKind,
    pub povm: PovmSpec,
    pub ascent: AscentSpec,
    pub sweep: Option<SweepSpec>,
    pub workers: usize,
}

impl ScenarioConfig {
    /// Defaults for everything but `omega_true`.
    pub fn with_omega(omega_true: f64) -> Self {
        Self {
            noise: NoiseSpec {
                kind: NoiseKind::None,
                theta: 0.0,
                phi: 0.0,
                gamma: 0.0,
                gamma_plus: 0.0,
                gamma_minus: 0.0,
            },
            omega_true,
            omega_hat: omega_true,
            probe: ProbeSpec::Plus,
            horizon: 5.0,
            dt: 0.05,
            objective: ObjectiveKind::Qfi,
            povm: PovmSpec::PlusMinus,
            ascent: AscentSpec::default(),
            sweep: None,
            workers: 1,
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::parse(&text)?;
        // Relative schedule paths are taken relative to the config file.
        if let (Some(s), Some(dir)) = (config.ascent.schedule.as_mut(), path.parent()) {
            if s.is_relative() {
                *s = dir.join(&*s);
            }
        }
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut seen = BTreeSet::new();
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    message: "empty key or value".into(),
                });
            }
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.into(),
                });
            }
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.into(),
                });
            }
            entries.push((key.to_string(), value.to_string()));
        }
        let get = |k: &str| entries.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());

        let omega_true = match get("omega_true") {
            Some(v) => parse_f64("omega_true", v)?,
            None => return Err(bad("omega_true", "required")),
        };
        let mut c = Self::with_omega(omega_true);
        if let Some(v) = get("omega_hat") {
            c.omega_hat = parse_f64("omega_hat", v)?;
        }

        if let Some(v) = get("noise.kind") {
            c.noise.kind = match v {
                "none" => NoiseKind::None,
                "dephasing" => NoiseKind::Dephasing,
                "parallel" => {
                    c.noise.theta = 0.0;
                    NoiseKind::Dephasing
                }
                "transverse" => {
                    c.noise.theta = PI / 2.0;
                    NoiseKind::Dephasing
                }
                "spontaneous" => NoiseKind::Spontaneous,
                other => return Err(bad("noise.kind", format!("unknown noise kind `{other}`"))),
            };
            let preset = matches!(v, "parallel" | "transverse");
            if preset && get("noise.theta").is_some() {
                return Err(bad("noise.theta", format!("conflicts with noise.kind = {v}")));
            }
        }
        for (key, slot) in [
            ("noise.theta", &mut c.noise.theta),
            ("noise.phi", &mut c.noise.phi),
            ("noise.gamma", &mut c.noise.gamma),
            ("noise.gamma_plus", &mut c.noise.gamma_plus),
            ("noise.gamma_minus", &mut c.noise.gamma_minus),
        ] {
            if let Some(v) = get(key) {
                *slot = parse_f64(key, v)?;
            }
        }
        let kind = c.noise.kind;
        for (key, used) in [
            ("noise.theta", kind == NoiseKind::Dephasing),
            ("noise.phi", kind == NoiseKind::Dephasing),
            ("noise.gamma", kind == NoiseKind::Dephasing),
            ("noise.gamma_plus", kind == NoiseKind::Spontaneous),
            ("noise.gamma_minus", kind == NoiseKind::Spontaneous),
        ] {
            if get(key).is_some() && !used {
                return Err(bad(key, "does not apply to the selected noise.kind"));
            }
        }

        if let Some(v) = get("probe") {
            c.probe = match v {
                "zero" | "0" => ProbeSpec::Zero,
                "plus" | "+" => ProbeSpec::Plus,
                other => {
                    let parts = other
                        .split(',')
                        .map(|p| parse_f64("probe", p.trim()))
                        .collect::<Result<Vec<_>, _>>()?;
                    let r: [f64; 3] = parts
                        .try_into()
                        .map_err(|_| bad("probe", "expected zero, plus, or three Bloch components"))?;
                    BlochVector::from_array(r).map_err(|e| bad("probe", e.to_string()))?;
                    ProbeSpec::Bloch(r)
                }
            };
        }
        if let Some(v) = get("horizon") {
            c.horizon = parse_f64("horizon", v)?;
        }
        if let Some(v) = get("dt") {
            c.dt = parse_f64("dt", v)?;
        }
        if let Some(v) = get("objective") {
            c.objective = match v {
                "qfi" => ObjectiveKind::Qfi,
                "cfi" => ObjectiveKind::Cfi,
                other => return Err(bad("objective", format!("expected qfi or cfi, found `{other}`"))),
            };
        }
        if let Some(v) = get("povm") {
            c.povm = match v {
                "plus_minus" => PovmSpec::PlusMinus,
                "computational" => PovmSpec::Computational,
                other => return Err(bad("povm", format!("unknown POVM `{other}`"))),
            };
        }
        if let Some(v) = get("workers") {
            c.workers = parse_usize("workers", v)?;
        }

        let a = &mut c.ascent;
        if let Some(v) = get("ascent.step_size") {
            a.step_size = parse_f64("ascent.step_size", v)?;
        }
        if let Some(v) = get("ascent.max_iterations") {
            a.max_iterations = parse_usize("ascent.max_iterations", v)?;
        }
        if let Some(v) = get("ascent.tolerance") {
            a.tolerance = parse_f64("ascent.tolerance", v)?;
        }
        if let Some(v) = get("ascent.seed") {
            a.seed = v
                .parse()
                .map_err(|_| bad("ascent.seed", format!("`{v}` is not a nonnegative integer")))?;
        }
        if let Some(v) = get("ascent.init") {
            a.init = match v {
                "zero" => InitKind::Zero,
                "random" => InitKind::Random,
                "schedule" => InitKind::Schedule,
                other => return Err(bad("ascent.init", format!("expected zero, random or schedule, found `{other}`"))),
            };
        }
        if let Some(v) = get("ascent.init_low") {
            a.init_low = parse_f64("ascent.init_low", v)?;
        }
        if let Some(v) = get("ascent.init_high") {
            a.init_high = parse_f64("ascent.init_high", v)?;
        }
        if let Some(v) = get("ascent.backtracking") {
            a.backtracking = parse_bool("ascent.backtracking", v)?;
        }
        if let Some(v) = get("ascent.update") {
            a.update = match v {
                "plain" => UpdateRule::Plain,
                "adam" => UpdateRule::adam(),
                other => return Err(bad("ascent.update", format!("expected plain or adam, found `{other}`"))),
            };
        }
        if let Some(v) = get("ascent.gradient") {
            a.method = match v {
                "exact" => GradientMethod::Exact,
                "first_order" => GradientMethod::FirstOrder,
                other => return Err(bad("ascent.gradient", format!("expected exact or first_order, found `{other}`"))),
            };
        }
        if let Some(v) = get("ascent.schedule") {
            a.schedule = Some(PathBuf::from(v));
        }

        if let Some(axis) = get("sweep.axis") {
            let axis = match axis {
                "theta" => SweepAxis::Theta,
                "horizon" => SweepAxis::Horizon,
                "omega_hat" => SweepAxis::OmegaHat,
                "omega_true" => SweepAxis::OmegaTrue,
                "t0" => SweepAxis::T0,
                other => return Err(bad("sweep.axis", format!("unknown axis `{other}`"))),
            };
            let values = match (get("sweep.values"), get("sweep.start"), get("sweep.stop"), get("sweep.points")) {
                (Some(list), None, None, None) => list
                    .split(',')
                    .map(|p| parse_f64("sweep.values", p.trim()))
                    .collect::<Result<Vec<_>, _>>()?,
                (None, Some(a), Some(b), Some(n)) => {
                    let (a, b) = (parse_f64("sweep.start", a)?, parse_f64("sweep.stop", b)?);
                    let n = parse_usize("sweep.points", n)?;
                    if n < 2 {
                        return Err(bad("sweep.points", "a range needs at least two points"));
                    }
                    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
                }
                _ => {
                    return Err(bad(
                        "sweep",
                        "give either sweep.values or all of sweep.start, sweep.stop, sweep.points",
                    ))
                }
            };
            let pulse_model = match get("sweep.pulse_model") {
                None => None,
                Some("parallel") => Some(PulseModel::Parallel),
                Some("spontaneous") => Some(PulseModel::Spontaneous),
                Some(other) => return Err(bad("sweep.pulse_model", format!("unknown model `{other}`"))),
            };
            c.sweep = Some(SweepSpec {
                axis,
                values,
                pulse_model,
            });
        } else if let Some(k) = SWEEP_KEYS.iter().find(|k| get(k).is_some()) {
            return Err(bad(k, "requires sweep.axis"));
        }

        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, v) in [("omega_true", self.omega_true), ("omega_hat", self.omega_hat)] {
            if !v.is_finite() {
                return Err(bad(key, "must be finite"));
            }
        }
        self.noise.model().validate().map_err(|e| bad("noise", e.to_string()))?;
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(bad("horizon", "must be finite and nonnegative"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(bad("dt", "must be positive"));
        }
        if self.workers == 0 {
            return Err(bad("workers", "must be at least 1"));
        }
        let a = &self.ascent;
        if a.init == InitKind::Schedule && a.schedule.is_none() {
            return Err(bad("ascent.init", "schedule initialization needs ascent.schedule"));
        }
        if a.init != InitKind::Schedule && a.schedule.is_some() {
            return Err(bad("ascent.schedule", "only used with ascent.init = schedule"));
        }
        self.ascent_config(self.omega_hat, None)
            .validate()
            .map_err(|e| bad("ascent", e.to_string()))?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(bad("sweep.values", "empty grid"));
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return Err(bad("sweep.values", "grid values must be finite"));
            }
            if sweep.values.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(bad("sweep.values", "grid must be strictly increasing"));
            }
            if sweep.pulse_model.is_some() && sweep.axis != SweepAxis::T0 {
                return Err(bad("sweep.pulse_model", "only used with sweep.axis = t0"));
            }
            if sweep.axis == SweepAxis::T0 && a.init == InitKind::Schedule {
                return Err(bad("ascent.init", "a pulse scan does not optimize"));
            }
            if a.init == InitKind::Schedule && matches!(sweep.axis, SweepAxis::Horizon) {
                return Err(bad("ascent.init", "a fixed schedule cannot cover several horizons"));
            }
        }
        Ok(())
    }

    /// Ascent settings for a design frequency `omega_hat`; random
    /// initialization is scaled by it.
    pub fn ascent_config(&self, omega_hat: f64, schedule: Option<qgrape_core::ControlGrid>) -> AscentConfig {
        let a = &self.ascent;
        let scale = omega_hat.abs();
        let init = match (a.init, schedule) {
            (InitKind::Zero, _) => InitMode::Zero,
            (InitKind::Random, _) => InitMode::RandomUniform {
                low: a.init_low * scale,
                high: a.init_high * scale,
            },
            (InitKind::Schedule, Some(grid)) => InitMode::UserSupplied(grid),
            // Placeholder for validation before the file is read.
            (InitKind::Schedule, None) => InitMode::Zero,
        };
        AscentConfig {
            step_size: a.step_size,
            max_iterations: a.max_iterations,
            tolerance: a.tolerance,
            seed: a.seed,
            init,
            dt: self.dt,
            backtracking: a.backtracking,
            method: a.method,
            update: a.update,
        }
    }

    pub fn objective(&self) -> Objective {
        match self.objective {
            ObjectiveKind::Qfi => Objective::Qfi,
            ObjectiveKind::Cfi => Objective::Cfi(self.povm.povm()),
        }
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn snapshot(&self) -> String {
        let mut out = Vec::new();
        let mut put = |k: &str, v: String| out.push(format!("{k} = {v}"));
        put("omega_true", render_f64(self.omega_true));
        put("omega_hat", render_f64(self.omega_hat));
        let n = &self.noise;
        match n.kind {
            NoiseKind::None => put("noise.kind", "none".into()),
            NoiseKind::Dephasing => {
                put("noise.kind", "dephasing".into());
                put("noise.theta", render_f64(n.theta));
                put("noise.phi", render_f64(n.phi));
                put("noise.gamma", render_f64(n.gamma));
            }
            NoiseKind::Spontaneous => {
                put("noise.kind", "spontaneous".into());
                put("noise.gamma_plus", render_f64(n.gamma_plus));
                put("noise.gamma_minus", render_f64(n.gamma_minus));
            }
        }
        put("probe", self.probe.render());
        put("horizon", render_f64(self.horizon));
        put("dt", render_f64(self.dt));
        put(
            "objective",
            match self.objective {
                ObjectiveKind::Qfi => "qfi",
                ObjectiveKind::Cfi => "cfi",
            }
            .into(),
        );
        put("povm", self.povm.name().into());
        put("workers", self.workers.to_string());
        let a = &self.ascent;
        put("ascent.step_size", render_f64(a.step_size));
        put("ascent.max_iterations", a.max_iterations.to_string());
        put("ascent.tolerance", render_f64(a.tolerance));
        put("ascent.seed", a.seed.to_string());
        put(
            "ascent.init",
            match a.init {
                InitKind::Zero => "zero",
                InitKind::Random => "random",
                InitKind::Schedule => "schedule",
            }
            .into(),
        );
        put("ascent.init_low", render_f64(a.init_low));
        put("ascent.init_high", render_f64(a.init_high));
        put("ascent.backtracking", a.backtracking.to_string());
        put(
            "ascent.update",
            match a.update {
                UpdateRule::Plain => "plain",
                UpdateRule::Adam { .. } => "adam",
            }
            .into(),
        );
        put(
            "ascent.gradient",
            match a.method {
                GradientMethod::Exact => "exact",
                GradientMethod::FirstOrder => "first_order",
            }
            .into(),
        );
        if let Some(s) = &a.schedule {
            put("ascent.schedule", s.display().to_string());
        }
        if let Some(s) = &self.sweep {
            put("sweep.axis", s.axis.name().into());
            put(
                "sweep.values",
                s.values.iter().map(|v| render_f64(*v)).collect::<Vec<_>>().join(", "),
            );
            if let Some(m) = s.pulse_model {
                put(
                    "sweep.pulse_model",
                    match m {
                        PulseModel::Parallel => "parallel",
                        PulseModel::Spontaneous => "spontaneous",
                    }
                    .into(),
                );
            }
        }
        out.join("\n") + "\n"
    }
}

const SWEEP_KEYS: [&str; 6] = [
    "sweep.values",
    "sweep.start",
    "sweep.stop",
    "sweep.points",
    "sweep.pulse_model",
    "sweep.axis",
];

pub const KEYS: [&str; 31] = [
    "noise.kind",
    "noise.theta",
    "noise.phi",
    "noise.gamma",
    "noise.gamma_plus",
    "noise.gamma_minus",
    "omega_true",
    "omega_hat",
    "probe",
    "horizon",
    "dt",
    "objective",
    "povm",
    "workers",
    "ascent.step_size",
    "ascent.max_iterations",
    "ascent.tolerance",
    "ascent.seed",
    "ascent.init",
    "ascent.init_low",
    "ascent.init_high",
    "ascent.backtracking",
    "ascent.update",
    "ascent.gradient",
    "ascent.schedule",
    "sweep.axis",
    "sweep.values",
    "sweep.start",
    "sweep.stop",
    "sweep.points",
    "sweep.pulse_model",
];

/// Shortest text that parses back to the same bits.
fn render_f64(v: f64) -> String {
    if v == PI {
        return "pi".into();
    }
    if v == PI / 2.0 {
        return "pi/2".into();
    }
    format!("{v:?}")
}

/// Plain decimals plus `pi`, `pi/N`, `X*pi` and `X*pi/N`.
pub fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let err = || bad(key, format!("`{v}` is not a number"));
    let s = v.trim();
    if let Some(idx) = s.find("pi") {
        let (pre, post) = (&s[..idx], &s[idx + 2..]);
        let factor = match pre.trim() {
            "" => 1.0,
            "-" => -1.0,
            p => p.strip_suffix('*').ok_or_else(err)?.trim().parse::<f64>().map_err(|_| err())?,
        };
        let divisor = match post.trim() {
            "" => 1.0,
            p => p.strip_prefix('/').ok_or_else(err)?.trim().parse::<f64>().map_err(|_| err())?,
        };
        return Ok(factor * PI / divisor);
    }
    let x: f64 = s.parse().map_err(|_| err())?;
    if x.is_nan() {
        return Err(err());
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse()
        .map_err(|_| bad(key, format!("`{v}` is not a nonnegative integer")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(bad(key, format!("`{v}` is not true or false"))),
    }
}
