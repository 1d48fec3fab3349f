//! Driver for the `hessian-bellman` binary: configuration, runs and artifacts.

pub mod config;
pub mod error;
pub mod output;

use std::fs;
use std::path::PathBuf;

use hessian_bellman::bellman::build_control_net;
use hessian_bellman::solver::{admissibility_audit, build_problem, degeneracy_ladder, solve, ProblemConfig, Strategy};
use hessian_bellman::suite::{algebra_suite, bellman_suite, quasi_suite};

pub use config::{Command, RunConfig};
pub use error::CliError;
use output::{
    assumption_entries, audit_entries, ladder_summary, monitor_entries, num, property_table, section, solve_entries,
    write_grid_csv,
};

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Every asserted property held.
    pub passed: bool,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
    pub artifacts: Vec<PathBuf>,
}

fn problem_entries(p: &ProblemConfig) -> Vec<(String, String)> {
    vec![
        ("domain".into(), p.domain.name().into()),
        ("d".into(), p.d.to_string()),
        ("m".into(), p.m.to_string()),
        ("h".into(), num(p.h)),
        ("g".into(), p.rhs.describe()),
        ("K".into(), num(p.k_budget)),
    ]
}

fn header(config: &RunConfig, passed: bool) -> String {
    let mut out = String::new();
    section(
        &mut out,
        "run",
        &[
            ("command".into(), config.command.name().into()),
            ("status".into(), if passed { "pass" } else { "fail" }.into()),
        ],
    );
    if let Some(p) = &config.problem {
        section(&mut out, "problem", &problem_entries(p));
    }
    out
}

fn net_entries(config: &RunConfig, controls: usize) -> Vec<(String, String)> {
    let s = &config.solver;
    vec![
        ("frames".into(), config.net.frames.to_string()),
        ("profiles".into(), config.net.profiles.to_string()),
        ("seed".into(), config.net.seed.to_string()),
        ("controls".into(), controls.to_string()),
        ("strategy".into(), if s.strategy == Strategy::Howard { "howard" } else { "value-iteration" }.into()),
        ("tol".into(), num(s.tol)),
        ("max_iters".into(), s.max_iters.to_string()),
    ]
}

fn write(path: PathBuf, text: &str, artifacts: &mut Vec<PathBuf>) -> Result<(), CliError> {
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    artifacts.push(path);
    Ok(())
}

/// Executes one command and writes its artifacts into `config.out_dir`.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    fs::create_dir_all(&config.out_dir).map_err(|e| CliError::io(&config.out_dir, e))?;
    match config.command {
        Command::Solve => run_solve(config),
        Command::Ladder => run_ladder(config),
        Command::Props => run_props(config),
        Command::Audit => run_audit(config),
    }
}

fn problem_of(config: &RunConfig) -> Result<&ProblemConfig, CliError> {
    config
        .problem
        .as_ref()
        .ok_or_else(|| CliError::Config { field: Some("problem".into()), message: "missing [problem] block".into() })
}

fn assumption_warning(summary: &mut Vec<String>, passes: bool) {
    if !passes {
        summary.push("warning: regularity assumption on g is not met (see [assumption])".into());
    }
}

fn run_solve(config: &RunConfig) -> Result<Outcome, CliError> {
    let pc = problem_of(config)?;
    let problem = build_problem::<f64>(pc)?;
    let net = build_control_net::<f64>(pc.d, pc.m, config.net.frames, config.net.profiles, config.net.seed)?;
    let report = solve(&problem, &net, &config.solver, None)?;
    let mut artifacts = Vec::new();
    let csv = config.out_dir.join("u.csv");
    write_grid_csv(&csv, &problem.grid, &report.u)?;
    artifacts.push(csv);
    let mut text = header(config, true);
    section(&mut text, "net", &net_entries(config, net.len()));
    section(&mut text, "solver", &solve_entries(&report));
    section(&mut text, "assumption", &assumption_entries(&report.assumption));
    section(&mut text, "monitors", &monitor_entries(&report.monitors));
    write(config.out_dir.join("report.txt"), &text, &mut artifacts)?;
    let mut summary = vec![format!(
        "solve: converged in {} iterations, residual {:.3e}, admissible {:.2}%",
        report.iterations,
        report.final_residual(),
        100.0 * report.monitors.admissible_fraction
    )];
    assumption_warning(&mut summary, report.assumption.passes());
    Ok(Outcome { passed: true, summary, artifacts })
}

fn run_ladder(config: &RunConfig) -> Result<Outcome, CliError> {
    let pc = problem_of(config)?;
    let problem = build_problem::<f64>(pc)?;
    let net = build_control_net::<f64>(pc.d, pc.m, config.net.frames, config.net.profiles, config.net.seed)?;
    let mut artifacts = Vec::new();
    let (report, failure) = match degeneracy_ladder(&problem, &config.ladder, &net, &config.solver) {
        Ok(r) => (r, None),
        Err(e) => {
            let msg = e.to_string();
            (e.partial, Some(msg))
        }
    };
    for rung in &report.rungs {
        let csv = config.out_dir.join(format!("u_n{}.csv", rung.n));
        write_grid_csv(&csv, &problem.grid, &rung.report.u)?;
        artifacts.push(csv);
    }
    let passed = failure.is_none() && report.c11_surrogate;
    let mut text = header(config, passed);
    section(&mut text, "net", &net_entries(config, net.len()));
    section(&mut text, "assumption", &assumption_entries(&problem.assumption));
    ladder_summary(&mut text, &report);
    write(config.out_dir.join("ladder_report.txt"), &text, &mut artifacts)?;
    if let Some(msg) = failure {
        return Err(CliError::Ladder(msg));
    }
    let mut summary: Vec<String> = report
        .rungs
        .iter()
        .map(|r| {
            format!(
                "rung n = {}: {} iterations, interior D2 max {:.4}, admissible {:.2}%",
                r.n,
                r.report.iterations,
                r.report.monitors.interior_d2_max,
                100.0 * r.report.monitors.admissible_fraction
            )
        })
        .collect();
    summary.push(format!(
        "C11 surrogate: variation {:.3e} -> {}",
        report.d2_variation,
        if report.c11_surrogate { "pass" } else { "FAIL" }
    ));
    assumption_warning(&mut summary, problem.assumption.passes());
    Ok(Outcome { passed, summary, artifacts })
}

fn run_props(config: &RunConfig) -> Result<Outcome, CliError> {
    let p = &config.props;
    let mut reports = algebra_suite(p.cases, p.seed)?;
    reports.extend(bellman_suite(p.cases, p.seed)?);
    reports.extend(quasi_suite(p.pairs, p.seed)?);
    let table = property_table(&reports);
    let passed = reports.iter().all(|r| r.passed());
    let mut artifacts = Vec::new();
    write(config.out_dir.join("props.txt"), &table, &mut artifacts)?;
    let mut summary: Vec<String> = table.lines().map(str::to_string).collect();
    summary.push(format!(
        "{} of {} properties passed",
        reports.iter().filter(|r| r.passed()).count(),
        reports.len()
    ));
    Ok(Outcome { passed, summary, artifacts })
}

fn run_audit(config: &RunConfig) -> Result<Outcome, CliError> {
    let pc = problem_of(config)?;
    let audit = config.audit.as_ref().ok_or_else(|| CliError::missing("audit", "input"))?;
    let problem = build_problem::<f64>(pc)?;
    let u = output::read_grid_csv(&audit.input, &problem.grid)?;
    let report = admissibility_audit(&u, &problem, audit.treatment)?;
    let passed = report.fraction >= audit.min_fraction;
    let mut text = header(config, passed);
    let mut entries = vec![
        ("input".to_string(), audit.input.display().to_string()),
        ("min_fraction".to_string(), num(audit.min_fraction)),
    ];
    entries.extend(audit_entries(&report));
    section(&mut text, "audit", &entries);
    let mut artifacts = Vec::new();
    write(config.out_dir.join("audit.txt"), &text, &mut artifacts)?;
    let summary = vec![format!(
        "audit: {} of {} nodes admissible ({:.2}%), worst margin {:.3e}",
        report.admissible,
        report.audited,
        100.0 * report.fraction,
        report.worst_margin
    )];
    Ok(Outcome { passed, summary, artifacts })
}

/// `[failure]` block printed on stderr when a run fails.
pub fn failure_block(command: Option<Command>, kind: &str, field: Option<&str>, message: &str) -> String {
    let mut entries = vec![
        ("command".to_string(), command.map(Command::name).unwrap_or("unknown").to_string()),
        ("kind".to_string(), kind.to_string()),
    ];
    if let Some(f) = field {
        entries.push(("field".to_string(), f.to_string()));
    }
    entries.push(("message".to_string(), message.replace('\n', " ")));
    let mut out = String::new();
    section(&mut out, "failure", &entries);
    out
}

