use std::fmt;

use super::howard::solve;
use super::problem::GridProblem;
use super::{SolveReport, SolverOptions};
use crate::bellman::ControlNet;
use crate::error::Error;
use crate::scalar::Real;

/// Allowed relative spread of the interior second-difference maximum over the
/// upper half of the ladder.
pub const C11_VARIATION: f64 = 0.1;

/// One regularized solve with `g_n = g + 1 / (2n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rung<T> {
    pub n: usize,
    pub shift: f64,
    pub report: SolveReport<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderReport<T> {
    pub rungs: Vec<Rung<T>>,
    /// `sup |u_i - u_j|` for every pair of rungs.
    pub distances: Vec<Vec<f64>>,
    /// `(max - min) / max` of `interior_d2_max` over `rungs[len / 2..]`.
    pub d2_variation: f64,
    /// `d2_variation <= C11_VARIATION`.
    pub c11_surrogate: bool,
}

impl<T> LadderReport<T> {
    pub fn last(&self) -> Option<&Rung<T>> {
        self.rungs.last()
    }
}

/// A rung failed; the report holds the rungs solved before it.
#[derive(Debug, Clone)]
pub struct LadderError<T> {
    pub n: Option<usize>,
    pub source: Error,
    pub partial: LadderReport<T>,
}

impl<T> fmt::Display for LadderError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.n {
            Some(n) => write!(f, "ladder rung n = {n} failed: {}", self.source),
            None => write!(f, "ladder rejected: {}", self.source),
        }
    }
}

impl<T: fmt::Debug> std::error::Error for LadderError<T> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

fn summarize<T: Real>(rungs: Vec<Rung<T>>) -> LadderReport<T> {
    let distances = rungs
        .iter()
        .map(|a| {
            rungs
                .iter()
                .map(|b| {
                    a.report
                        .u
                        .iter()
                        .zip(&b.report.u)
                        .map(|(&x, &y)| (x - y).abs().to_f64_lossy())
                        .fold(0.0, f64::max)
                })
                .collect()
        })
        .collect();
    let top: Vec<f64> = rungs[rungs.len() / 2..].iter().map(|r| r.report.monitors.interior_d2_max).collect();
    let hi = top.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = top.iter().copied().fold(f64::INFINITY, f64::min);
    let d2_variation = if top.is_empty() || hi <= 0.0 { 0.0 } else { (hi - lo) / hi };
    LadderReport { rungs, distances, d2_variation, c11_surrogate: d2_variation <= C11_VARIATION }
}

/// Solves with `g + 1 / (2n)` for each `n`, warm-starting every rung from the
/// previous one.
pub fn degeneracy_ladder<T: Real>(
    problem: &GridProblem<T>,
    n_list: &[usize],
    net: &ControlNet<T>,
    options: &SolverOptions,
) -> std::result::Result<LadderReport<T>, LadderError<T>> {
    let reject = |msg: String| LadderError {
        n: None,
        source: Error::Argument(msg),
        partial: LadderReport { rungs: Vec::new(), distances: Vec::new(), d2_variation: 0.0, c11_surrogate: false },
    };
    if n_list.is_empty() {
        return Err(reject("ladder needs at least one n".into()));
    }
    if n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(reject(format!("ladder indices must be positive and increasing, got {n_list:?}")));
    }
    let mut rungs: Vec<Rung<T>> = Vec::new();
    for &n in n_list {
        let shift = 1.0 / (2.0 * n as f64);
        let shifted = problem.shifted_rhs(T::lit(shift));
        let warm = rungs.last().map(|r| r.report.u.as_slice());
        match solve(&shifted, net, options, warm) {
            Ok(report) => rungs.push(Rung { n, shift, report }),
            Err(source) => return Err(LadderError { n: Some(n), source, partial: summarize(rungs) }),
        }
    }
    Ok(summarize(rungs))
}
