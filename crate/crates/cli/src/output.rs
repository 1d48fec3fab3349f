//! CSV grid functions and `key = value` reports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hessian_bellman::quasi::ViolationReport;
use hessian_bellman::solver::{AssumptionCheck, AuditReport, Grid, LadderReport, Monitors, SolveReport};

use crate::error::CliError;

pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// One row per node: coordinates then `u`, 17 significant digits.
pub fn write_grid_csv(path: &Path, grid: &Grid<f64>, u: &[f64]) -> Result<(), CliError> {
    let d = grid.dim();
    let mut out = String::with_capacity(u.len() * 25 * (d + 1));
    out.push_str(&AXES[..d].join(","));
    out.push_str(",u\n");
    for (i, &v) in u.iter().enumerate() {
        for x in grid.coords(i) {
            out.push_str(&num(x));
            out.push(',');
        }
        out.push_str(&num(v));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Reads a grid function written by [`write_grid_csv`] and checks that its
/// nodes are those of `grid`.
pub fn read_grid_csv(path: &Path, grid: &Grid<f64>) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |msg: String| CliError::Config { field: Some("audit.input".into()), message: format!("{}: {msg}", path.display()) };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let d = grid.dim();
    if header.split(',').count() != d + 1 {
        return Err(bad(format!("expected {} columns, header is `{header}`", d + 1)));
    }
    let mut u = Vec::with_capacity(grid.node_count());
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        if fields.len() != d + 1 {
            return Err(bad(format!("row {} has {} columns", i + 1, fields.len())));
        }
        if u.len() >= grid.node_count() {
            return Err(bad(format!("more rows than the {} grid nodes", grid.node_count())));
        }
        let x = grid.coords(u.len());
        if x.iter().zip(&fields).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(bad(format!("row {} does not sit on the configured grid", i + 1)));
        }
        u.push(fields[d]);
    }
    if u.len() != grid.node_count() {
        return Err(bad(format!("{} rows, grid has {} nodes", u.len(), grid.node_count())));
    }
    Ok(u)
}

pub(crate) fn section(out: &mut String, name: &str, entries: &[(String, String)]) {
    let _ = writeln!(out, "[{name}]");
    for (k, v) in entries {
        let _ = writeln!(out, "{k} = {v}");
    }
    out.push('\n');
}

pub(crate) fn monitor_entries(m: &Monitors) -> Vec<(String, String)> {
    vec![
        ("barrier_ratio".into(), num(m.barrier_ratio)),
        ("max_gradient".into(), num(m.max_gradient)),
        ("interior_d2_max".into(), num(m.interior_d2_max)),
        ("boundary_d2_max".into(), num(m.boundary_d2_max)),
        ("d2_ratio".into(), num(m.d2_ratio)),
        ("min_boundary_normal_derivative".into(), num(m.min_boundary_normal_derivative)),
        ("max_boundary_normal_derivative".into(), num(m.max_boundary_normal_derivative)),
        ("hopf_gamma".into(), num(m.hopf_gamma)),
        ("subharmonic_slack".into(), num(m.subharmonic_slack)),
        ("max_u".into(), num(m.max_u)),
        ("admissible_fraction".into(), num(m.admissible_fraction)),
        ("admissibility_margin".into(), num(m.admissibility_margin)),
    ]
}

pub(crate) fn assumption_entries(a: &AssumptionCheck) -> Vec<(String, String)> {
    vec![
        ("k_budget".into(), num(a.k_budget)),
        ("worst_excess".into(), num(a.worst_excess)),
        ("exact".into(), a.exact.to_string()),
        ("within_o_h".into(), a.within_o_h.to_string()),
        ("sup_g".into(), num(a.sup_g)),
        ("sup_condition".into(), a.sup_condition.to_string()),
        ("passes".into(), a.passes().to_string()),
    ]
}

pub(crate) fn history(h: &[f64]) -> String {
    h.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
}

pub(crate) fn solve_entries(r: &SolveReport<f64>) -> Vec<(String, String)> {
    vec![
        ("iterations".into(), r.iterations.to_string()),
        ("sweeps".into(), r.sweeps.to_string()),
        ("final_residual".into(), num(r.final_residual())),
        ("residual_history".into(), history(&r.residual_history)),
    ]
}

pub(crate) fn ladder_summary(out: &mut String, r: &LadderReport<f64>) {
    for rung in &r.rungs {
        let mut entries = vec![("n".to_string(), rung.n.to_string()), ("shift".to_string(), num(rung.shift))];
        entries.extend(solve_entries(&rung.report));
        entries.extend(monitor_entries(&rung.report.monitors));
        section(out, &format!("rung.{}", rung.n), &entries);
    }
    let mut entries = vec![("n".to_string(), r.rungs.iter().map(|x| x.n.to_string()).collect::<Vec<_>>().join(", "))];
    for (rung, row) in r.rungs.iter().zip(&r.distances) {
        entries.push((format!("distances.{}", rung.n), row.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")));
    }
    entries.push(("d2_variation".into(), num(r.d2_variation)));
    entries.push(("c11_surrogate".into(), r.c11_surrogate.to_string()));
    section(out, "ladder", &entries);
}

pub(crate) fn audit_entries(a: &AuditReport) -> Vec<(String, String)> {
    vec![
        ("audited".into(), a.audited.to_string()),
        ("admissible".into(), a.admissible.to_string()),
        ("fraction".into(), num(a.fraction)),
        ("worst_margin".into(), num(a.worst_margin)),
        ("tolerance".into(), num(a.tolerance)),
    ]
}

/// Fixed-width pass/fail table.
pub fn property_table(reports: &[ViolationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<62} {:>8} {:>10} {:>14} {:>6}  result", "property", "cases", "violations", "worst_slack", "seed");
    for r in reports {
        let _ = writeln!(
            out,
            "{:<62} {:>8} {:>10} {:>14.6e} {:>6}  {}",
            r.label,
            r.cases,
            r.violations,
            r.worst_slack,
            r.seed,
            if r.passed() { "PASS" } else { "FAIL" }
        );
    }
    out
}
