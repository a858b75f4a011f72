use std::fmt::Write as _;
use std::path::Path;

use crate::config::Method;
use crate::error::HarnessError;
use crate::experiment::RunResult;

/// 17 significant digits: enough to round-trip any `f64`.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV text: one header row and one row per step. Columns of unselected
/// methods are omitted; strided-out observations are empty fields.
pub fn render_csv(result: &RunResult) -> String {
    let methods = &result.config.methods;
    let mut header = vec!["step", "t", "truth_x1", "truth_x2", "obs_z"];
    if methods.contains(&Method::Kf) {
        header.extend(["kf_x1", "kf_x2", "kf_p11"]);
    }
    if methods.contains(&Method::Enkf) {
        header.extend(["enkf_x1", "enkf_x2"]);
    }
    if methods.contains(&Method::Var3d) {
        header.extend(["var3d_x1", "var3d_x2"]);
    }

    let mut out = header.join(",");
    out.push('\n');
    let mut row = Vec::with_capacity(header.len());
    for (k, x) in result.truth.states().iter().enumerate() {
        row.clear();
        row.push(k.to_string());
        row.push(num(result.truth.time(k)));
        row.push(num(x[0]));
        row.push(num(x[1]));
        row.push(result.observations[k].as_ref().map(|z| num(z[0])).unwrap_or_default());
        if let Some(kf) = &result.kf {
            row.extend([num(kf[k].mean[0]), num(kf[k].mean[1]), num(kf[k].cov[(0, 0)])]);
        }
        if let Some(enkf) = &result.enkf {
            row.extend([num(enkf.means[k][0]), num(enkf.means[k][1])]);
        }
        if let Some(var3d) = &result.var3d {
            row.extend([num(var3d[k][0]), num(var3d[k][1])]);
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `key=value` lines: run parameters, then per-method RMSE.
pub fn render_metrics(result: &RunResult) -> String {
    let cfg = &result.config;
    let mut out = String::new();
    let _ = writeln!(out, "seed={}", cfg.seed);
    let _ = writeln!(out, "dt={}", cfg.dt);
    let _ = writeln!(out, "steps={}", cfg.steps);
    let _ = writeln!(out, "r_var={}", cfg.r_var);
    for m in &result.metrics {
        let _ = writeln!(out, "{}_rmse_x1={}", m.name, num(m.rmse_x1));
        let _ = writeln!(out, "{}_rmse_x2={}", m.name, num(m.rmse_x2));
        let _ = writeln!(out, "{}_rmse_x1_secondhalf={}", m.name, num(m.rmse_x1_second_half));
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

pub fn write_csv(result: &RunResult, path: &Path) -> Result<(), HarnessError> {
    write_file(path, &render_csv(result))
}

pub fn write_metrics(result: &RunResult, path: &Path) -> Result<(), HarnessError> {
    write_file(path, &render_metrics(result))
}
