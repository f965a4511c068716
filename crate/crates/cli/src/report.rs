//! `report`: merge prior outputs into one text summary organized by
//! formulation.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::commands::{DEFECT_JSON, IDENTITIES_JSON, SCAN_JSON};
use crate::CliError;

pub const REPORT_TXT: &str = "report.txt";

/// Wavenumbers from different routes agreeing this closely are the same.
const MATCH_TOL: f64 = 1e-4;

fn load(dir: &Path, name: &str) -> Result<Option<Value>, CliError> {
    let path = dir.join(name);
    match fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(CliError::Io { path: path.display().to_string(), source: e }),
    }
}

fn numbers(v: &Value, key: &str) -> Vec<f64> {
    v[key].as_array().map(|a| a.iter().filter_map(Value::as_f64).collect()).unwrap_or_default()
}

fn shape_line(v: &Value) -> String {
    let s = &v["config"]["shape"];
    match s["kind"].as_str() {
        Some("ball") => format!("ball, radius {}", s["radius"]),
        Some("ellipsoid") => format!("ellipsoid, semi-axes {}", s["semi_axes"]),
        Some("star") => format!("star shape, base radius {}, terms {}", s["base_radius"], s["coefficients"]),
        Some("mesh") => format!("mesh {}", s["path"]),
        _ => "unknown shape".into(),
    }
}

struct Checks<'a>(Option<&'a Value>);

impl Checks<'_> {
    fn group(&self, out: &mut String, group: &str) {
        let Some(v) = self.0 else {
            let _ = writeln!(out, "  [missing: {IDENTITIES_JSON} not found]");
            return;
        };
        let list: Vec<&Value> = v["checks"]
            .as_array()
            .map(|a| a.iter().filter(|c| c["group"] == group).collect())
            .unwrap_or_default();
        if list.is_empty() {
            let _ = writeln!(out, "  (no checks in group \"{group}\")");
        }
        for c in list {
            let status = c["status"].as_str().unwrap_or("?");
            let name = c["name"].as_str().unwrap_or("?");
            let detail = match (c["rel_discrepancy"].as_f64(), c["tolerance"].as_f64()) {
                (Some(d), Some(t)) => format!(" ({d:.2e}, tolerance {t:.0e})"),
                _ => match (c["lhs"][0].as_f64(), c["rhs"][0].as_f64(), c["note"].as_str()) {
                    (Some(v), Some(b), note) => {
                        let op = c["comparison"].as_str().unwrap_or("").trim_start_matches("lhs ").trim_end_matches("rhs").trim();
                        let extra = note.map(|n| format!("; {n}")).unwrap_or_default();
                        format!(" ({v:.4e} {op} {b}{extra})")
                    }
                    (_, _, Some(n)) => format!(" ({n})"),
                    _ => String::new(),
                },
            };
            let _ = writeln!(out, "  {status:<7} {name}{detail}");
        }
    }

    fn group_passes(&self, group: &str) -> bool {
        self.0
            .and_then(|v| v["checks"].as_array())
            .map(|a| {
                let g: Vec<_> = a.iter().filter(|c| c["group"] == group).collect();
                !g.is_empty() && g.iter().all(|c| c["status"] == "pass")
            })
            .unwrap_or(false)
    }
}

/// Builds the report text. Errors when none of the inputs exist.
pub fn build_report(dir: &Path) -> Result<String, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Config(format!("{} is not a directory", dir.display())));
    }
    let scan = load(dir, SCAN_JSON)?;
    let defect = load(dir, DEFECT_JSON)?;
    let ids = load(dir, IDENTITIES_JSON)?;
    if scan.is_none() && defect.is_none() && ids.is_none() {
        return Err(CliError::Config(format!(
            "{} holds none of {SCAN_JSON}, {DEFECT_JSON}, {IDENTITIES_JSON}",
            dir.display()
        )));
    }
    let checks = Checks(ids.as_ref());
    let mut out = String::new();
    let _ = writeln!(out, "Pompeiu laboratory report");
    let _ = writeln!(out, "=========================");
    for (name, v) in [("scan", &scan), ("defect", &defect), ("verify", &ids)] {
        match v {
            Some(v) => {
                let _ = writeln!(out, "{name:<7} {}", shape_line(v));
            }
            None => {
                let _ = writeln!(out, "{name:<7} [missing]");
            }
        }
    }

    let _ = writeln!(out, "\nFormulation 1: moving averages of a plane wave");
    checks.group(&mut out, "formulation 1");

    let _ = writeln!(out, "\nFormulation 2: zero spheres of the indicator transform");
    let candidates: Vec<f64> = match &scan {
        Some(v) => {
            let ks: Vec<f64> = v["zero_candidates"]
                .as_array()
                .map(|a| a.iter().filter_map(|c| c["k"].as_f64()).collect())
                .unwrap_or_default();
            let list = if ks.is_empty() {
                "none".to_string()
            } else {
                ks.iter().map(|k| format!("{k:.10}")).collect::<Vec<_>>().join(", ")
            };
            let _ = writeln!(out, "  zero-sphere candidates (grid-resolved): {list}");
            let _ = writeln!(out, "  floor of m(k)/|D|: {:.6e} ({})", v["floor"].as_f64().unwrap_or(f64::NAN), v["floor_note"].as_str().unwrap_or(""));
            ks
        }
        None => {
            let _ = writeln!(out, "  [missing: {SCAN_JSON} not found]");
            vec![]
        }
    };
    checks.group(&mut out, "formulation 2");

    let _ = writeln!(out, "\nFormulation 3: over-determined problem with zero Cauchy data");
    if let Some(k) = ids.as_ref().and_then(|v| v["k_star"].as_f64()) {
        let _ = writeln!(out, "  explicit ball solution at k* = {k:.10}");
    }
    checks.group(&mut out, "formulation 3");
    checks.group(&mut out, "fourier identity");

    let _ = writeln!(out, "\nFormulation 4: constant Dirichlet trace with zero Neumann trace");
    let witnesses = match &defect {
        Some(v) => {
            let w = numbers(v, "witnesses");
            let list = if w.is_empty() {
                "none".to_string()
            } else {
                w.iter().map(|k| format!("{k:.8}")).collect::<Vec<_>>().join(", ")
            };
            let _ = writeln!(out, "  basis degree L = {} ({})", v["basis"]["degree"], v["basis"]["degree_source"].as_str().unwrap_or(""));
            let _ = writeln!(out, "  defect minima below {:e}: {list}", v["witness_threshold"].as_f64().unwrap_or(f64::NAN));
            let _ = writeln!(out, "  defect floor: {:.6e} ({})", v["floor"].as_f64().unwrap_or(f64::NAN), v["floor_note"].as_str().unwrap_or(""));
            w
        }
        None => {
            let _ = writeln!(out, "  [missing: {DEFECT_JSON} not found]");
            vec![]
        }
    };

    let _ = writeln!(out, "\nSymmetry identities and lemmas");
    for g in ["transform", "theorem 6", "divergence", "lemma 1", "lemma 2", "lemma 3", "cross expansion", "translation", "projected identity"] {
        let _ = writeln!(out, " {g}");
        checks.group(&mut out, g);
    }
    if let Some(v) = &ids {
        let s = &v["summary"];
        let _ = writeln!(out, "  suite: {} pass, {} fail, {} skipped", s["pass"], s["fail"], s["skipped"]);
    }

    let _ = writeln!(out, "\nConsistency");
    let k_star = ids.as_ref().and_then(|v| v["k_star"].as_f64());
    let f3_ok = checks.group_passes("formulation 3");
    let consistent: Vec<f64> = match k_star {
        Some(k) if f3_ok => candidates
            .iter()
            .copied()
            .filter(|c| (c - k).abs() < MATCH_TOL && witnesses.iter().any(|w| (w - c).abs() < MATCH_TOL))
            .collect(),
        _ => vec![],
    };
    if let Some(k) = consistent.first() {
        let _ = writeln!(out, "  Formulations 2/3/4 witnesses consistent at k ≈ {k:.4}");
    } else if scan.is_none() || defect.is_none() || ids.is_none() {
        let _ = writeln!(out, "  [incomplete: need scan, defect and verify outputs to cross-check]");
    } else {
        let _ = writeln!(out, "  no wavenumber is witnessed by all of Formulations 2, 3 and 4");
    }
    Ok(out)
}

/// Writes `report.txt` into `dir` and returns its text.
pub fn cmd_report(dir: &Path) -> Result<String, CliError> {
    let text = build_report(dir)?;
    let path = dir.join(REPORT_TXT);
    fs::write(&path, &text).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    Ok(text)
}
