//! Deterministic text outputs: the trajectory CSV and the flat report record.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use blowup_core::diagnostics::Trajectory;

use crate::pipeline::RunReport;

pub const CSV_HEADER: &str = "t,psi,dpsi,ddpsi_eq,E,defect,inf2_rhs";

/// 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".into(), fmt_f64)
}

pub fn trajectory_csv(traj: Option<&Trajectory>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in traj.map(|t| t.samples()).unwrap_or_default() {
        let row = [s.t, s.psi, s.dpsi, s.ddpsi_eq, s.energy, s.defect, s.inf2_rhs].map(fmt_f64);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses a CSV produced by [`trajectory_csv`] back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<[f64; 7]>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("unexpected CSV header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let vals: Vec<f64> = line
                .split(',')
                .map(|f| f.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
                .collect::<Result<_, _>>()?;
            vals.try_into().map_err(|_| format!("row {}: expected 7 columns", i + 1))
        })
        .collect()
}

pub fn report_record(r: &RunReport) -> String {
    let mut kv: Vec<(String, String)> = vec![("scenario".into(), r.name.clone())];
    let mut put = |k: &str, v: String| kv.push((k.into(), v));
    if let Some(kind) = r.model_kind {
        put("model.kind", kind.name().into());
    }
    if let Some(a) = r.alpha {
        put("model.alpha", fmt_f64(a));
    }
    if let Some(r0) = r.r0 {
        put("model.r0", fmt_f64(r0));
    }
    if let Some(b) = &r.built {
        put("built.k2", fmt_f64(b.k2));
        put("built.c0", fmt_f64(b.c0));
        put("built.c1", fmt_f64(b.c1));
        put("built.energy", fmt_f64(b.achieved_energy));
        put("built.root_count", b.root_count.to_string());
    }
    if let Some(c) = &r.criteria {
        put("criteria.satisfied", c.satisfied.to_string());
        put("criteria.l1", fmt_f64(c.l1_value));
        put("criteria.l2_lhs", fmt_f64(c.l2_lhs));
        put("criteria.l2_rhs", fmt_f64(c.l2_rhs));
        put("criteria.a0", fmt_f64(c.a0));
        put("criteria.energy0", fmt_f64(c.energy0));
        put("criteria.psi0", fmt_f64(c.psi0));
        put("criteria.dpsi0", fmt_f64(c.dpsi0));
        put("criteria.time_bound", fmt_opt(c.levine_time_bound));
    }
    if let Some(ok) = r.kg_condition {
        put("kg_condition.satisfied", ok.to_string());
    }
    if let Some(nb) = &r.nb_condition {
        put("nb_condition.satisfied", nb.satisfied.to_string());
        put("nb_condition.ratio", fmt_f64(nb.ratio));
        put("nb_condition.middle", fmt_f64(nb.middle));
        put("nb_condition.r0_boundary", fmt_f64(nb.r0_boundary));
    }
    if let Some(fg) = &r.fg {
        put("fg.verified", fg.verified.to_string());
        put("fg.worst_margin", fmt_f64(fg.worst_margin));
        put("fg.samples", fg.samples.to_string());
    }
    if let Some(v) = &r.verdict {
        put("verdict.status", v.status.name().into());
        put("verdict.t_detect", fmt_opt(v.t_detect));
        put("verdict.psi_final", fmt_f64(v.psi_final));
        put("verdict.steps", v.steps.to_string());
        put("verdict.reason", v.reason.clone());
    }
    if let Some((abs, rel)) = r.drift {
        put("drift.absolute", fmt_f64(abs));
        put("drift.relative", fmt_opt(rel));
    }
    if let Some(t) = &r.trajectory {
        put("trajectory.samples", t.len().to_string());
    }
    for e in &r.errors {
        put(&format!("error.{}", e.stage), e.message.replace('\n', " "));
    }
    for c in &r.checks {
        let name = c.check.name();
        put(&format!("check.{name}"), if c.passed { "pass" } else { "fail" }.into());
        put(&format!("check.{name}.worst"), fmt_opt(c.worst));
        put(&format!("check.{name}.note"), c.note.clone());
    }
    put("result", if r.all_checks_passed() { "pass" } else { "fail" }.into());
    let mut out = String::new();
    for (k, v) in kv {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

pub struct OutputPaths {
    pub csv: PathBuf,
    pub report: PathBuf,
}

/// Writes `<out_dir>/<name>/trajectory.csv` and `report.txt`.
pub fn write_outputs(report: &RunReport, out_dir: &Path) -> io::Result<OutputPaths> {
    let dir = out_dir.join(&report.name);
    fs::create_dir_all(&dir)?;
    let paths = OutputPaths { csv: dir.join("trajectory.csv"), report: dir.join("report.txt") };
    fs::write(&paths.csv, trajectory_csv(report.trajectory.as_ref()))?;
    fs::write(&paths.report, report_record(report))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trajectory_gives_header_only() {
        assert_eq!(trajectory_csv(None), format!("{CSV_HEADER}\n"));
        assert!(parse_csv(&trajectory_csv(None)).unwrap().is_empty());
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MAX, 5e-324] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }
}
