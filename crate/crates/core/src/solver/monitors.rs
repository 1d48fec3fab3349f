use super::problem::GridProblem;
use super::scheme::{discrete_hessian, hessian_directions, BoundaryTreatment, Stencils};
use crate::bellman::{kappa_of_spectrum, rhs_power};
use crate::cone::{admissibility_margin, CLOSURE_MARGIN};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symfun::{spectrum, SymMat};

/// Admissibility is tested on `H + AUDIT_RELATIVE_TOL * scale * I`, where
/// `scale` is the largest Hessian entry over the audited nodes.
pub const AUDIT_RELATIVE_TOL: f64 = 1e-6;

/// A priori quantities measured on a grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Monitors {
    /// `sup |u| / psi` over interior nodes.
    pub barrier_ratio: f64,
    /// Largest discrete gradient norm.
    pub max_gradient: f64,
    /// Largest Hessian spectral radius away from the boundary layer.
    pub interior_d2_max: f64,
    /// Largest Hessian spectral radius on the boundary layer.
    pub boundary_d2_max: f64,
    /// `interior_d2_max / (1 + boundary_d2_max)`.
    pub d2_ratio: f64,
    /// Extremes of `u / dist` over boundary-layer nodes with `dist >= h / 4`.
    pub min_boundary_normal_derivative: f64,
    pub max_boundary_normal_derivative: f64,
    /// `-max_boundary_normal_derivative`; positive when the Hopf bound holds.
    pub hopf_gamma: f64,
    /// `min (Delta_h u - d kappa(I) g^(1-1/m))` over interior nodes.
    pub subharmonic_slack: f64,
    /// Largest interior value of `u`.
    pub max_u: f64,
    pub admissible_fraction: f64,
    pub admissibility_margin: f64,
}

/// Result of [`admissibility_audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// Nodes with a complete stencil.
    pub audited: usize,
    pub admissible: usize,
    pub fraction: f64,
    /// Smallest normalized cone margin of the shifted Hessians.
    pub worst_margin: f64,
    /// Absolute shift `AUDIT_RELATIVE_TOL * scale`.
    pub tolerance: f64,
}

fn check_len<T>(u: &[T], problem: &GridProblem<T>) -> Result<()>
where
    T: Real,
{
    if u.len() != problem.grid.node_count() {
        return Err(Error::Argument(format!(
            "grid function has {} values, grid has {} nodes",
            u.len(),
            problem.grid.node_count()
        )));
    }
    Ok(())
}

fn spectral_radius<T: Real>(h: &SymMat<T>) -> Result<f64> {
    let s = spectrum(h)?;
    Ok(s.values().iter().map(|v| v.to_f64_lossy().abs()).fold(0.0, f64::max))
}

/// Share of interior nodes whose discrete Hessian lies in the closed cone
/// `C_m`, within the tolerance [`AUDIT_RELATIVE_TOL`].
pub fn admissibility_audit<T: Real>(
    u: &[T],
    problem: &GridProblem<T>,
    treatment: BoundaryTreatment,
) -> Result<AuditReport> {
    check_len(u, problem)?;
    let d = problem.dim();
    let st = Stencils::build(problem, hessian_directions(d), treatment);
    let hessians: Vec<SymMat<T>> = (0..st.interior.len())
        .filter(|&pos| st.complete[pos])
        .map(|pos| discrete_hessian(&st, u, pos, d))
        .collect();
    let scale = hessians.iter().map(|h| h.max_abs().to_f64_lossy()).fold(0.0, f64::max);
    let tolerance = AUDIT_RELATIVE_TOL * scale;
    let mut admissible = 0;
    let mut worst = f64::INFINITY;
    for h in &hessians {
        let margin = admissibility_margin(h, problem.m, T::lit(tolerance))?.to_f64_lossy();
        if margin >= CLOSURE_MARGIN {
            admissible += 1;
        }
        worst = worst.min(margin);
    }
    let audited = hessians.len();
    Ok(AuditReport {
        audited,
        admissible,
        fraction: if audited == 0 { 1.0 } else { admissible as f64 / audited as f64 },
        worst_margin: if audited == 0 { 0.0 } else { worst },
        tolerance,
    })
}

/// Barrier, gradient, second-difference, Hopf, subharmonicity and
/// admissibility monitors of a grid function with zero boundary values.
pub fn compute_monitors<T: Real>(problem: &GridProblem<T>, u: &[T]) -> Result<Monitors> {
    check_len(u, problem)?;
    let d = problem.dim();
    let m = problem.m;
    let h = problem.spacing().to_f64_lossy();
    let st = Stencils::build(problem, hessian_directions(d), BoundaryTreatment::CutCell);
    let iso = vec![T::one() / T::count(d); d];
    let iso_kappa = kappa_of_spectrum(&iso, m);
    let mut mon = Monitors {
        barrier_ratio: 0.0,
        max_gradient: 0.0,
        interior_d2_max: 0.0,
        boundary_d2_max: 0.0,
        d2_ratio: 0.0,
        min_boundary_normal_derivative: f64::INFINITY,
        max_boundary_normal_derivative: f64::NEG_INFINITY,
        hopf_gamma: 0.0,
        subharmonic_slack: f64::INFINITY,
        max_u: f64::NEG_INFINITY,
        admissible_fraction: 1.0,
        admissibility_margin: 0.0,
    };
    for (pos, &i) in st.interior.iter().enumerate() {
        let x = problem.grid.coords(i);
        let value = u[i].to_f64_lossy();
        let psi = problem.domain.psi(&x).to_f64_lossy();
        mon.barrier_ratio = mon.barrier_ratio.max(value.abs() / psi);
        mon.max_u = mon.max_u.max(value);
        let grad: f64 = (0..d).map(|k| st.first_diff(u, pos, k).to_f64_lossy().powi(2)).sum();
        mon.max_gradient = mon.max_gradient.max(grad.sqrt());
        let hess = discrete_hessian(&st, u, pos, d);
        let radius = spectral_radius(&hess)?;
        let laplacian = hess.trace() - T::count(d) * iso_kappa * rhs_power(problem.g[i], m);
        mon.subharmonic_slack = mon.subharmonic_slack.min(laplacian.to_f64_lossy());
        if st.touches_boundary[pos] {
            mon.boundary_d2_max = mon.boundary_d2_max.max(radius);
            let dist = problem.domain.distance(&x).to_f64_lossy();
            if dist >= h / 4.0 {
                let q = value / dist;
                mon.min_boundary_normal_derivative = mon.min_boundary_normal_derivative.min(q);
                mon.max_boundary_normal_derivative = mon.max_boundary_normal_derivative.max(q);
            }
        } else {
            mon.interior_d2_max = mon.interior_d2_max.max(radius);
        }
    }
    if st.interior.is_empty() {
        mon.subharmonic_slack = 0.0;
        mon.max_u = 0.0;
    }
    if !mon.min_boundary_normal_derivative.is_finite() {
        mon.min_boundary_normal_derivative = 0.0;
        mon.max_boundary_normal_derivative = 0.0;
    }
    mon.hopf_gamma = -mon.max_boundary_normal_derivative;
    mon.d2_ratio = mon.interior_d2_max / (1.0 + mon.boundary_d2_max);
    let audit = admissibility_audit(u, problem, BoundaryTreatment::CutCell)?;
    mon.admissible_fraction = audit.fraction;
    mon.admissibility_margin = audit.worst_margin;
    Ok(mon)
}
