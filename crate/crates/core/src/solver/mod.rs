//! Grid solver for `P_m(D^2 u) = g^(m-1)` in the disc/ball or the square/cube,
//! `u = 0` on the boundary, through the Bellman form
//! `inf_w [Tr(a(w) D^2 u) - kappa(w) g^(1-1/m)] = 0` over a lattice control net.

mod grid;
mod howard;
mod ladder;
mod monitors;
mod problem;
mod scheme;

pub use grid::{Domain, Grid};
pub use howard::{policy_iteration, solve};
pub use ladder::{degeneracy_ladder, LadderError, LadderReport, Rung, C11_VARIATION};
pub use monitors::{admissibility_audit, compute_monitors, AuditReport, Monitors, AUDIT_RELATIVE_TOL};
pub use problem::{build_problem, snap_distance, AssumptionCheck, GridProblem, ProblemConfig, RhsSpec, MAX_INTERVALS_3D};
pub use scheme::{discrete_bellman_operator, BoundaryTreatment, Scheme};

/// Outer iteration used by [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Howard policy iteration.
    Howard,
    /// Nonlinear Gauss-Seidel on the Bellman equation.
    ValueIteration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Stop when the sup-norm Bellman residual is at most this.
    pub tol: f64,
    /// Outer iterations (policy updates, or value-iteration sweeps / 100).
    pub max_iters: usize,
    /// Sweep budget of one inner linear solve.
    pub max_sweeps: usize,
    /// Over-relaxation factor; `None` picks `2 / (1 + sin(pi h / 2))`.
    pub relaxation: Option<f64>,
    pub strategy: Strategy,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iters: 200, max_sweeps: 200_000, relaxation: None, strategy: Strategy::Howard }
    }
}

/// Output of a converged solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    /// Values at every node of the box; zero on and outside the boundary.
    pub u: Vec<T>,
    /// Minimizing control per node; `None` off the interior.
    pub policy: Vec<Option<usize>>,
    /// Sup-norm Bellman residual after each outer iteration.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    /// Inner sweeps over all outer iterations.
    pub sweeps: usize,
    pub monitors: Monitors,
    pub assumption: AssumptionCheck,
}

impl<T> SolveReport<T> {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::INFINITY)
    }
}
