use super::monitors::compute_monitors;
use super::problem::GridProblem;
use super::scheme::{LinearSystem, Scheme, BOUNDARY};
use super::{SolveReport, SolverOptions, Strategy};
use crate::bellman::ControlNet;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Howard iteration with default inner settings.
pub fn policy_iteration<T: Real>(
    problem: &GridProblem<T>,
    net: &ControlNet<T>,
    tol: f64,
    max_iters: usize,
) -> Result<SolveReport<T>> {
    let options = SolverOptions { tol, max_iters, ..SolverOptions::default() };
    solve(problem, net, &options, None)
}

/// Solves the discrete Bellman equation, optionally from a starting guess.
pub fn solve<T: Real>(
    problem: &GridProblem<T>,
    net: &ControlNet<T>,
    options: &SolverOptions,
    warm_start: Option<&[T]>,
) -> Result<SolveReport<T>> {
    if !(options.tol > 0.0) || !options.tol.is_finite() {
        return Err(Error::Argument(format!("solver tolerance must be positive, got {}", options.tol)));
    }
    if options.max_iters == 0 || options.max_sweeps == 0 {
        return Err(Error::Argument("iteration budgets must be positive".into()));
    }
    if let Some(w) = options.relaxation {
        if !(w > 0.0 && w < 2.0) {
            return Err(Error::Argument(format!("relaxation factor must lie in (0, 2), got {w}")));
        }
    }
    let scheme = Scheme::new(problem, net)?;
    let nodes = problem.grid.node_count();
    let mut u = vec![T::zero(); nodes];
    if let Some(w) = warm_start {
        if w.len() != nodes {
            return Err(Error::Argument(format!("warm start has {} values, grid has {nodes} nodes", w.len())));
        }
        for &i in scheme.interior_nodes() {
            u[i] = w[i];
        }
    }
    let (history, policy, iterations, sweeps) = match options.strategy {
        Strategy::Howard => howard(&scheme, &mut u, options, warm_start.is_some())?,
        Strategy::ValueIteration => value_iteration(&scheme, &mut u, options)?,
    };
    let mut node_policy = vec![None; nodes];
    for (pos, &i) in scheme.interior_nodes().iter().enumerate() {
        node_policy[i] = Some(policy[pos]);
    }
    let monitors = compute_monitors(problem, &u)?;
    Ok(SolveReport {
        u,
        policy: node_policy,
        residual_history: history,
        iterations,
        sweeps,
        monitors,
        assumption: problem.assumption.clone(),
    })
}

fn default_relaxation<T: Real>(problem: &GridProblem<T>) -> f64 {
    let h = problem.spacing().to_f64_lossy();
    2.0 / (1.0 + (std::f64::consts::PI * h / 2.0).sin())
}

fn sup_residual<T: Real>(eval: &[(T, usize)]) -> f64 {
    eval.iter().map(|(v, _)| v.to_f64_lossy().abs()).fold(0.0, f64::max)
}

type Outcome = (Vec<f64>, Vec<usize>, usize, usize);

fn howard<T: Real>(scheme: &Scheme<'_, T>, u: &mut [T], options: &SolverOptions, warm: bool) -> Result<Outcome> {
    let n = scheme.interior_nodes().len();
    let mut policy = if warm { scheme.bellman_all(u).into_iter().map(|(_, j)| j).collect() } else { vec![0; n] };
    let mut omega = options.relaxation.unwrap_or_else(|| default_relaxation(scheme.problem));
    let mut inner_tol = options.tol / 10.0;
    let floor = options.tol * 1e-6;
    let mut history = Vec::new();
    let mut sweeps = 0;
    for iteration in 1..=options.max_iters {
        let system = scheme.assemble(&policy);
        sweeps += sor(&system, scheme.interior_nodes(), u, &mut omega, inner_tol, options.max_sweeps)
            .map_err(|e| attach_history(e, &history))?;
        let eval = scheme.bellman_all(u);
        let residual = sup_residual(&eval);
        history.push(residual);
        let next: Vec<usize> = eval.into_iter().map(|(_, j)| j).collect();
        if residual <= options.tol {
            return Ok((history, next, iteration, sweeps));
        }
        if next == policy {
            // Policy is stable but the residual is not below tol: the linear
            // solve was not tight enough.
            if inner_tol <= floor {
                break;
            }
            inner_tol /= 10.0;
        }
        policy = next;
    }
    Err(Error::NonConvergence {
        iterations: history.len(),
        last_residual: history.last().copied().unwrap_or(f64::INFINITY),
        residual_history: history,
    })
}

fn attach_history(e: Error, history: &[f64]) -> Error {
    match e {
        Error::NonConvergence { last_residual, iterations, .. } => {
            let mut residual_history = history.to_vec();
            residual_history.push(last_residual);
            Error::NonConvergence { iterations: iterations.max(history.len()), last_residual, residual_history }
        }
        other => other,
    }
}

fn linear_residual<T: Real>(sys: &LinearSystem<T>, interior: &[usize], u: &[T]) -> f64 {
    let mut worst = 0.0f64;
    for (pos, &i) in interior.iter().enumerate() {
        let mut s = sys.rhs[pos];
        for k in sys.row_ptr[pos]..sys.row_ptr[pos + 1] {
            s = s + sys.weights[k] * u[sys.cols[k] as usize];
        }
        let r = (s - sys.diag[pos] * u[i]).to_f64_lossy().abs();
        if !r.is_finite() {
            return f64::INFINITY;
        }
        worst = worst.max(r);
    }
    worst
}

const CHECK_EVERY: usize = 10;

/// Successive over-relaxation in lexicographic node order until the linear
/// residual is at most `tol`. Falls back to plain Gauss-Seidel (`omega = 1`),
/// which converges for these M-matrices, if over-relaxation blows up.
fn sor<T: Real>(
    sys: &LinearSystem<T>,
    interior: &[usize],
    u: &mut [T],
    omega: &mut f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<usize> {
    let start = linear_residual(sys, interior, u);
    if start <= tol {
        return Ok(0);
    }
    let saved = u.to_vec();
    let mut w = T::lit(*omega);
    let mut residual = start;
    for sweep in 1..=max_sweeps {
        for (pos, &i) in interior.iter().enumerate() {
            let mut s = sys.rhs[pos];
            for k in sys.row_ptr[pos]..sys.row_ptr[pos + 1] {
                s = s + sys.weights[k] * u[sys.cols[k] as usize];
            }
            let target = s / sys.diag[pos];
            u[i] = u[i] + w * (target - u[i]);
        }
        if sweep % CHECK_EVERY == 0 || sweep == max_sweeps {
            residual = linear_residual(sys, interior, u);
            if residual <= tol {
                return Ok(sweep);
            }
            if (!residual.is_finite() || residual > 1e6 * start) && *omega != 1.0 {
                u.copy_from_slice(&saved);
                *omega = 1.0;
                w = T::one();
            }
        }
    }
    Err(Error::NonConvergence { iterations: max_sweeps, last_residual: residual, residual_history: Vec::new() })
}

/// Nonlinear Gauss-Seidel: each node takes the smallest value that zeroes one
/// control's equation with the neighbors frozen, which zeroes the minimum.
fn value_iteration<T: Real>(scheme: &Scheme<'_, T>, u: &mut [T], options: &SolverOptions) -> Result<Outcome> {
    let interior = scheme.interior_nodes().to_vec();
    let st = &scheme.stencils;
    let mut history = Vec::new();
    for sweep in 1..=options.max_sweeps {
        for (pos, &i) in interior.iter().enumerate() {
            let mut best = T::infinity();
            for j in 0..scheme.control_count() {
                let (terms, kappa) = scheme.control_terms(j);
                let mut diag = T::zero();
                let mut s = -kappa * scheme.rhs_power_at(pos);
                for &(k, mu) in terms {
                    let (cp, cm) = st.coefficients(pos, k);
                    let arms = st.arms(pos, k);
                    for (arm, c) in arms.iter().zip([cp, cm]) {
                        diag = diag + mu * c;
                        if arm.target != BOUNDARY {
                            s = s + mu * c * u[arm.target as usize];
                        }
                    }
                }
                best = best.min(s / diag);
            }
            u[i] = best;
        }
        if sweep % CHECK_EVERY == 0 || sweep == options.max_sweeps {
            let eval = scheme.bellman_all(u);
            let residual = sup_residual(&eval);
            history.push(residual);
            if residual <= options.tol {
                let policy = eval.into_iter().map(|(_, j)| j).collect();
                return Ok((history, policy, sweep, sweep));
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: options.max_sweeps,
        last_residual: history.last().copied().unwrap_or(f64::INFINITY),
        residual_history: history,
    })
}
