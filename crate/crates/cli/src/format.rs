//! Text output: fixed-precision decimals, CSV tables and schedule files.

use std::fmt::Write as _;
use std::path::Path;

use qgrape_core::ControlGrid;

use crate::CliError;

/// Decimal rendering with `digits` significant digits (`nan`, `inf` and
/// `-inf` for non-finite values). Magnitudes outside `1e±30` switch to
/// exponent form to keep lines short.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp.abs() >= 30 {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits_only: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let n = digits_only.len() as i32;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp >= n - 1 {
        out.push_str(&digits_only);
        out.extend(std::iter::repeat_n('0', (exp - (n - 1)) as usize));
    } else if exp >= 0 {
        let split = (exp + 1) as usize;
        out.push_str(&digits_only[..split]);
        out.push('.');
        out.push_str(&digits_only[split..]);
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits_only);
    }
    out
}

/// Digits used in result tables.
pub const TABLE_DIGITS: usize = 12;
/// Schedules keep enough digits to load back bit for bit.
pub const SCHEDULE_DIGITS: usize = 17;

pub fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn schedule_csv(grid: &ControlGrid) -> String {
    let mut header = vec!["step_index".to_string(), "t_start".to_string()];
    header.extend((1..=grid.controls()).map(|k| format!("V_{k}")));
    let rows: Vec<Vec<String>> = (0..grid.steps())
        .map(|j| {
            let mut row = vec![j.to_string(), fmt_sig(j as f64 * grid.dt(), SCHEDULE_DIGITS)];
            row.extend(grid.step(j).iter().map(|v| fmt_sig(*v, SCHEDULE_DIGITS)));
            row
        })
        .collect();
    csv(&header, &rows)
}

/// Parses a schedule file. The step width is `dt` when given, otherwise it
/// is inferred from the first two rows; either way every `t_start` must sit
/// on the uniform grid.
pub fn parse_schedule(text: &str, dt: Option<f64>) -> Result<ControlGrid, String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or("empty schedule file")?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "step_index" || cols[1] != "t_start" {
        return Err(format!("bad header `{header}`; expected step_index,t_start,V_1,..."));
    }
    let p = cols.len() - 2;
    for (k, name) in cols[2..].iter().enumerate() {
        if *name != format!("V_{}", k + 1) {
            return Err(format!("column {} is `{name}`, expected V_{}", k + 3, k + 1));
        }
    }
    let mut starts = Vec::new();
    let mut amps = Vec::new();
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != p + 2 {
            return Err(format!("line {}: expected {} fields, found {}", idx + 1, p + 2, fields.len()));
        }
        let j: usize = fields[0]
            .parse()
            .map_err(|_| format!("line {}: bad step index `{}`", idx + 1, fields[0]))?;
        if j != starts.len() {
            return Err(format!("line {}: step index {j} out of order", idx + 1));
        }
        let num = |s: &str| -> Result<f64, String> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("line {}: `{s}` is not a finite number", idx + 1))
        };
        starts.push(num(fields[1])?);
        for f in &fields[2..] {
            amps.push(num(f)?);
        }
    }
    let m = starts.len();
    let dt = match dt {
        Some(dt) => dt,
        None if m >= 2 => starts[1] - starts[0],
        None => return Err("cannot infer the step width from fewer than two rows; pass --dt".into()),
    };
    for (j, t) in starts.iter().enumerate() {
        let expected = j as f64 * dt;
        if (t - expected).abs() > 1e-9 * expected.abs().max(1.0) {
            return Err(format!("step {j} starts at {t}, expected {expected} for step width {dt}"));
        }
    }
    ControlGrid::new(m, p, dt, amps).map_err(|e| e.to_string())
}

pub fn read_schedule(path: &Path, dt: Option<f64>) -> Result<ControlGrid, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_schedule(&text, dt).map_err(|e| CliError::Input(format!("schedule {}: {e}", path.display())))
}

/// `(t, E(t))` as CSV.
pub fn energy_csv(energy: &[(f64, f64)]) -> String {
    let mut out = String::from("t,energy\n");
    for (t, e) in energy {
        let _ = writeln!(out, "{},{}", fmt_sig(*t, TABLE_DIGITS), fmt_sig(*e, TABLE_DIGITS));
    }
    out
}
