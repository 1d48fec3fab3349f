//! Run configuration: `[section]` headers, `key = value` lines, `#` comments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hessian_bellman::solver::{BoundaryTreatment, Domain, ProblemConfig, RhsSpec, SolverOptions, Strategy};

use crate::error::CliError;

/// Subcommand being run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Ladder,
    Props,
    Audit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Ladder => "ladder",
            Command::Props => "props",
            Command::Audit => "audit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed but untyped configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = RawConfig::default();
        let mut section: Option<String> = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match line.find('#') {
                Some(p) => &line[..p],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::syntax(line_no, "section header must end with `]`"))?
                    .trim();
                if name.is_empty() {
                    return Err(CliError::syntax(line_no, "empty section name"));
                }
                raw.sections.entry(name.to_string()).or_default();
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::syntax(line_no, "expected `key = value` or `[section]`"))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(CliError::syntax(line_no, "empty key"));
            }
            let name = section
                .clone()
                .ok_or_else(|| CliError::syntax(line_no, "key outside of any section"))?;
            let table = raw.sections.entry(name.clone()).or_default();
            if table.contains_key(key) {
                return Err(CliError::syntax(line_no, &format!("duplicate key `{key}` in [{name}]")));
            }
            table.insert(key.to_string(), Entry { value: value.trim().to_string(), line: line_no });
        }
        Ok(raw)
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entry(section, key).map(|e| e.value.as_str())
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str, CliError> {
        self.get(section, key).ok_or_else(|| CliError::missing(section, key))
    }

    fn parse_value<T: FromStr>(&self, section: &str, key: &str, value: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let line = self.entry(section, key).map(|e| e.line).unwrap_or(0);
        value
            .parse::<T>()
            .map_err(|e| CliError::invalid(section, key, line, &format!("cannot parse `{value}`: {e}")))
    }

    pub fn required<T: FromStr>(&self, section: &str, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let v = self.require(section, key)?;
        self.parse_value(section, key, v)
    }

    pub fn optional<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(section, key) {
            Some(v) => self.parse_value(section, key, v),
            None => Ok(default),
        }
    }

    fn invalid(&self, section: &str, key: &str, message: &str) -> CliError {
        let line = self.entry(section, key).map(|e| e.line).unwrap_or(0);
        CliError::invalid(section, key, line, message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetConfig {
    pub frames: usize,
    pub profiles: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropsConfig {
    /// Draws per algebra and Bellman check.
    pub cases: usize,
    /// Pairs per quasiconvexity check.
    pub pairs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    pub input: PathBuf,
    pub treatment: BoundaryTreatment,
    pub min_fraction: f64,
}

/// Everything one invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub problem: Option<ProblemConfig>,
    pub net: NetConfig,
    pub solver: SolverOptions,
    pub ladder: Vec<usize>,
    pub props: PropsConfig,
    pub audit: Option<AuditConfig>,
    pub out_dir: PathBuf,
}

fn positive(raw: &RawConfig, section: &str, key: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(raw.invalid(section, key, "must be positive"))
    }
}

fn positive_count(raw: &RawConfig, section: &str, key: &str, value: usize) -> Result<usize, CliError> {
    if value > 0 {
        Ok(value)
    } else {
        Err(raw.invalid(section, key, "must be at least 1"))
    }
}

fn read_tabulated(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.chars().next().is_some_and(|c| c.is_alphabetic()) {
            continue;
        }
        let last = line.rsplit(',').next().unwrap_or(line).trim();
        let v = last.parse::<f64>().map_err(|e| CliError::Config {
            field: Some("problem.g".into()),
            message: format!("{}:{}: cannot parse `{last}`: {e}", path.display(), i + 1),
        })?;
        values.push(v);
    }
    Ok(values)
}

fn problem_block(raw: &RawConfig, base: &Path) -> Result<ProblemConfig, CliError> {
    let s = "problem";
    let domain = Domain::parse(raw.require(s, "domain")?).map_err(|e| raw.invalid(s, "domain", &e.to_string()))?;
    let d: usize = raw.required(s, "d")?;
    let m: usize = raw.required(s, "m")?;
    let h = positive(raw, s, "h", raw.required(s, "h")?)?;
    let g_spec = raw.require(s, "g")?;
    let rhs = match g_spec.split_once(char::is_whitespace) {
        Some(("tabulated", path)) => RhsSpec::Tabulated(read_tabulated(&base.join(path.trim()))?),
        _ if g_spec == "tabulated" => return Err(raw.invalid(s, "g", "`tabulated` needs a file path")),
        _ => RhsSpec::parse(g_spec).map_err(|e| raw.invalid(s, "g", &e.to_string()))?,
    };
    let k_budget: f64 = raw.required(s, "K")?;
    Ok(ProblemConfig { domain, d, m, h, rhs, k_budget })
}

fn parse_list(raw: &RawConfig, section: &str, key: &str) -> Result<Vec<usize>, CliError> {
    let text = raw.require(section, key)?;
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| raw.invalid(section, key, &format!("`{}`: {e}", t.trim()))))
        .collect()
}

impl RunConfig {
    /// Builds a run configuration. Relative paths resolve against `base`.
    pub fn from_text(text: &str, command: Command, base: &Path) -> Result<Self, CliError> {
        let raw = RawConfig::parse(text)?;
        let needs_problem = command != Command::Props;
        let problem = if needs_problem { Some(problem_block(&raw, base)?) } else { None };
        let net = NetConfig {
            frames: positive_count(&raw, "net", "frames", raw.optional("net", "frames", 8)?)?,
            profiles: positive_count(&raw, "net", "profiles", raw.optional("net", "profiles", 8)?)?,
            seed: raw.optional("net", "seed", 1)?,
        };
        let defaults = SolverOptions::default();
        let relaxation = match raw.get("solver", "relaxation") {
            None | Some("auto") => None,
            Some(v) => Some(raw.parse_value::<f64>("solver", "relaxation", v)?),
        };
        let solver = SolverOptions {
            tol: positive(&raw, "solver", "tol", raw.optional("solver", "tol", defaults.tol)?)?,
            max_iters: positive_count(&raw, "solver", "max_iters", raw.optional("solver", "max_iters", defaults.max_iters)?)?,
            max_sweeps: positive_count(
                &raw,
                "solver",
                "max_sweeps",
                raw.optional("solver", "max_sweeps", defaults.max_sweeps)?,
            )?,
            relaxation,
            strategy: if raw.optional("solver", "fallback", false)? { Strategy::ValueIteration } else { Strategy::Howard },
        };
        let ladder = if command == Command::Ladder { parse_list(&raw, "ladder", "n")? } else { Vec::new() };
        let props = PropsConfig {
            cases: positive_count(&raw, "props", "cases", raw.optional("props", "cases", 1000)?)?,
            pairs: positive_count(&raw, "props", "pairs", raw.optional("props", "pairs", 10_000)?)?,
            seed: raw.optional("props", "seed", 1)?,
        };
        let audit = if command == Command::Audit {
            let treatment = match raw.get("audit", "boundary").unwrap_or("cut-cell") {
                "cut-cell" => BoundaryTreatment::CutCell,
                "nodal" => BoundaryTreatment::Nodal,
                other => {
                    return Err(raw.invalid("audit", "boundary", &format!("unknown treatment `{other}` (cut-cell | nodal)")))
                }
            };
            let min_fraction: f64 = raw.optional("audit", "min_fraction", 0.99)?;
            if !(0.0..=1.0).contains(&min_fraction) {
                return Err(raw.invalid("audit", "min_fraction", "must lie in [0, 1]"));
            }
            Some(AuditConfig { input: base.join(raw.require("audit", "input")?), treatment, min_fraction })
        } else {
            None
        };
        let out_dir = base.join(raw.get("output", "dir").unwrap_or("out"));
        Ok(RunConfig { command, problem, net, solver, ladder, props, audit, out_dir })
    }

    /// Applies `--seed`: it replaces both the net and the property seeds.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.net.seed = seed;
        self.props.seed = seed;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVE: &str = "
# benchmark
[problem]
domain = disc
d = 2
m = 2   # Monge-Ampere
h = 0.03125
g = constant 1
K = 1

[net]
frames = 8
profiles = 8
seed = 3
";

    #[test]
    fn parses_solve_config() {
        let c = RunConfig::from_text(SOLVE, Command::Solve, Path::new("/tmp")).unwrap();
        let p = c.problem.unwrap();
        assert_eq!((p.d, p.m, p.h), (2, 2, 0.03125));
        assert_eq!(p.rhs, RhsSpec::Constant(1.0));
        assert_eq!(c.net, NetConfig { frames: 8, profiles: 8, seed: 3 });
        assert_eq!(c.solver, SolverOptions::default());
        assert_eq!(c.out_dir, PathBuf::from("/tmp/out"));
    }

    #[test]
    fn missing_field_is_named() {
        let text = SOLVE.replace("m = 2   # Monge-Ampere\n", "");
        let e = RunConfig::from_text(&text, Command::Solve, Path::new(".")).unwrap_err();
        assert_eq!(e.field(), Some("problem.m"));
        assert!(e.to_string().contains("`m`"));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let e = RawConfig::parse("[problem]\nd 2\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
        assert!(RawConfig::parse("d = 2\n").is_err());
        assert!(RawConfig::parse("[a]\nx = 1\nx = 2\n").is_err());
        assert!(RawConfig::parse("[a\n").is_err());
    }

    #[test]
    fn invalid_values() {
        let text = SOLVE.replace("h = 0.03125", "h = -1");
        let e = RunConfig::from_text(&text, Command::Solve, Path::new(".")).unwrap_err();
        assert_eq!(e.field(), Some("problem.h"));
        let text = SOLVE.replace("frames = 8", "frames = many");
        assert_eq!(RunConfig::from_text(&text, Command::Solve, Path::new(".")).unwrap_err().field(), Some("net.frames"));
        let text = SOLVE.replace("g = constant 1", "g = gaussian");
        assert_eq!(RunConfig::from_text(&text, Command::Solve, Path::new(".")).unwrap_err().field(), Some("problem.g"));
    }

    #[test]
    fn seed_override_and_props_defaults() {
        let c = RunConfig::from_text("[props]\ncases = 10\n", Command::Props, Path::new(".")).unwrap().with_seed(9);
        assert!(c.problem.is_none());
        assert_eq!(c.props, PropsConfig { cases: 10, pairs: 10_000, seed: 9 });
        assert_eq!(c.net.seed, 9);
    }

    #[test]
    fn ladder_and_audit_blocks() {
        let text = format!("{SOLVE}\n[ladder]\nn = 8, 32, 128\n[solver]\nfallback = true\nrelaxation = 1.5\n");
        let c = RunConfig::from_text(&text, Command::Ladder, Path::new(".")).unwrap();
        assert_eq!(c.ladder, vec![8, 32, 128]);
        assert_eq!(c.solver.strategy, Strategy::ValueIteration);
        assert_eq!(c.solver.relaxation, Some(1.5));
        let e = RunConfig::from_text(SOLVE, Command::Audit, Path::new(".")).unwrap_err();
        assert_eq!(e.field(), Some("audit.input"));
        let text = format!("{SOLVE}\n[audit]\ninput = out/u.csv\nboundary = nodal\n");
        let c = RunConfig::from_text(&text, Command::Audit, Path::new("/r")).unwrap();
        let a = c.audit.unwrap();
        assert_eq!(a.input, PathBuf::from("/r/out/u.csv"));
        assert_eq!(a.treatment, BoundaryTreatment::Nodal);
    }
}
