//! Monotone wide-stencil discretization of
//! `inf_w { Tr(a(w) D^2 u) - kappa(w) g^(1-1/m) } = 0`.
//!
//! Every lattice control has `a(w) = sum_k mu_k q_k q_k^T` with `q_k` along
//! integer directions `e_k`, so `Tr(a D^2 u)` becomes `sum_k mu_k D^2_{e_k} u`
//! with nonnegative weights. Near the boundary the second difference uses the
//! exact crossing of the step with the domain (Shortley-Weller), where the
//! boundary value is zero.

use rayon::prelude::*;

use super::grid::Grid;
use super::problem::{snap_distance, GridProblem};
use crate::bellman::{rhs_power, ControlNet};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symfun::SymMat;

pub(crate) const BOUNDARY: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Arm<T> {
    /// Node index, or `BOUNDARY` for a crossing carrying the value zero.
    pub target: u32,
    /// Physical length of the arm.
    pub dist: T,
}

/// How stencil arms that leave the domain are closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTreatment {
    /// Arms stop at the boundary crossing, where `u = 0`.
    CutCell,
    /// Arms always end at grid nodes and read the stored value there; nodes
    /// whose stencil leaves the bounding box are skipped.
    Nodal,
}

/// Interior nodes and their arms along a set of lattice directions.
#[derive(Debug, Clone)]
pub(crate) struct Stencils<T> {
    pub dirs: Vec<Vec<i32>>,
    pub interior: Vec<usize>,
    /// Node index to interior position, `u32::MAX` for boundary nodes.
    pub slot: Vec<u32>,
    arms: Vec<[Arm<T>; 2]>,
    /// Interior positions whose stencil is complete (always true for cut cells).
    pub complete: Vec<bool>,
    /// Whether some arm of the node stops at the boundary.
    pub touches_boundary: Vec<bool>,
}

impl<T: Real> Stencils<T> {
    pub fn build(problem: &GridProblem<T>, dirs: Vec<Vec<i32>>, treatment: BoundaryTreatment) -> Self {
        let grid: &Grid<T> = &problem.grid;
        let domain = problem.domain;
        let h = grid.spacing();
        let snap = snap_distance(h);
        let is_interior: Vec<bool> =
            (0..grid.node_count()).map(|i| domain.distance(&grid.coords(i)) > snap).collect();
        let interior: Vec<usize> = (0..grid.node_count()).filter(|&i| is_interior[i]).collect();
        let mut slot = vec![u32::MAX; grid.node_count()];
        for (pos, &idx) in interior.iter().enumerate() {
            slot[idx] = pos as u32;
        }
        let lengths: Vec<T> = dirs
            .iter()
            .map(|e| T::lit((e.iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt()))
            .collect();
        let mut arms = Vec::with_capacity(interior.len() * dirs.len());
        let mut complete = vec![true; interior.len()];
        let mut touches_boundary = vec![false; interior.len()];
        for (pos, &idx) in interior.iter().enumerate() {
            let x = grid.coords(idx);
            for (k, e) in dirs.iter().enumerate() {
                let mut pair = [Arm { target: BOUNDARY, dist: T::zero() }; 2];
                for (side, sign) in [(0usize, 1i32), (1, -1)] {
                    let step: Vec<i32> = e.iter().map(|&v| v * sign).collect();
                    let neighbor = grid.offset(idx, &step);
                    let full = h * lengths[k];
                    pair[side] = match treatment {
                        BoundaryTreatment::Nodal => match neighbor {
                            Some(j) => Arm { target: j as u32, dist: full },
                            None => {
                                complete[pos] = false;
                                Arm { target: BOUNDARY, dist: full }
                            }
                        },
                        BoundaryTreatment::CutCell => match neighbor {
                            Some(j) if is_interior[j] => Arm { target: j as u32, dist: full },
                            _ => {
                                let phys: Vec<T> = step.iter().map(|&v| T::lit(v as f64) * h).collect();
                                let s = domain.crossing(&x, &phys).max(T::lit(1e-12));
                                touches_boundary[pos] = true;
                                Arm { target: BOUNDARY, dist: s * full }
                            }
                        },
                    };
                }
                arms.push(pair);
            }
        }
        Self { dirs, interior, slot, arms, complete, touches_boundary }
    }

    #[inline]
    pub fn arms(&self, pos: usize, k: usize) -> &[Arm<T>; 2] {
        &self.arms[pos * self.dirs.len() + k]
    }

    #[inline]
    fn value(u: &[T], arm: &Arm<T>) -> T {
        if arm.target == BOUNDARY {
            T::zero()
        } else {
            u[arm.target as usize]
        }
    }

    /// Second difference of `u` at interior position `pos` along unit direction `dirs[k] / |dirs[k]|`.
    #[inline]
    pub fn second_diff(&self, u: &[T], pos: usize, k: usize) -> T {
        let [p, m] = self.arms(pos, k);
        let u0 = u[self.interior[pos]];
        let up = Self::value(u, p);
        let um = Self::value(u, m);
        let two = T::lit(2.0);
        two / (p.dist + m.dist) * ((up - u0) / p.dist + (um - u0) / m.dist)
    }

    /// First derivative along `dirs[k]` (unit-normalized) from the same arms.
    pub fn first_diff(&self, u: &[T], pos: usize, k: usize) -> T {
        let [p, m] = self.arms(pos, k);
        let u0 = u[self.interior[pos]];
        let (a, b) = (p.dist, m.dist);
        let up = Self::value(u, p) - u0;
        let um = Self::value(u, m) - u0;
        (b * b * up - a * a * um) / (a * b * (a + b))
    }

    /// Second-difference coefficients `(c_plus, c_minus)` of the arms.
    pub fn coefficients(&self, pos: usize, k: usize) -> (T, T) {
        let [p, m] = self.arms(pos, k);
        let two = T::lit(2.0);
        let s = p.dist + m.dist;
        (two / (p.dist * s), two / (m.dist * s))
    }
}

/// Canonical sign: first nonzero entry positive.
fn canonical(dir: &[i32]) -> Vec<i32> {
    let first = dir.iter().find(|&&v| v != 0).copied().unwrap_or(1);
    if first < 0 {
        dir.iter().map(|&v| -v).collect()
    } else {
        dir.to_vec()
    }
}

/// Axis directions followed by `e_i + e_j` and `e_i - e_j` for `i < j`.
pub(crate) fn hessian_directions(d: usize) -> Vec<Vec<i32>> {
    let mut dirs: Vec<Vec<i32>> = (0..d)
        .map(|i| {
            let mut e = vec![0; d];
            e[i] = 1;
            e
        })
        .collect();
    for i in 0..d {
        for j in (i + 1)..d {
            let mut plus = vec![0; d];
            plus[i] = 1;
            plus[j] = 1;
            let mut minus = vec![0; d];
            minus[i] = 1;
            minus[j] = -1;
            dirs.push(plus);
            dirs.push(minus);
        }
    }
    dirs
}

/// Discrete Hessian at an interior position from a stencil set built on
/// [`hessian_directions`]. Cross terms come from the two diagonal second
/// differences, which reduce to the four-point formula away from the boundary.
pub(crate) fn discrete_hessian<T: Real>(st: &Stencils<T>, u: &[T], pos: usize, d: usize) -> SymMat<T> {
    let mut hess = SymMat::zeros(d);
    for i in 0..d {
        hess.set(i, i, st.second_diff(u, pos, i));
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let plus = st.second_diff(u, pos, k);
            let minus = st.second_diff(u, pos, k + 1);
            hess.set(i, j, (plus - minus) / T::lit(2.0));
            k += 2;
        }
    }
    hess
}

#[derive(Debug, Clone)]
struct CompiledControl<T> {
    terms: Vec<(usize, T)>,
    kappa: T,
}

/// Discretized Bellman operator for one problem and one lattice control net.
#[derive(Debug, Clone)]
pub struct Scheme<'a, T> {
    pub(crate) problem: &'a GridProblem<T>,
    pub(crate) stencils: Stencils<T>,
    controls: Vec<CompiledControl<T>>,
    /// `g^(1 - 1/m)` per interior position.
    gpow: Vec<T>,
}

/// Compressed rows of `L^policy u + f = 0`, written as
/// `diag u_i = sum_j w_ij u_j + rhs_i`.
#[derive(Debug, Clone)]
pub(crate) struct LinearSystem<T> {
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub weights: Vec<T>,
    pub diag: Vec<T>,
    pub rhs: Vec<T>,
}

impl<'a, T: Real> Scheme<'a, T> {
    pub fn new(problem: &'a GridProblem<T>, net: &ControlNet<T>) -> Result<Self> {
        if net.dim() != problem.dim() || net.order() != problem.m {
            return Err(Error::Argument(format!(
                "control net (d = {}, m = {}) does not match the problem (d = {}, m = {})",
                net.dim(),
                net.order(),
                problem.dim(),
                problem.m
            )));
        }
        if !net.is_lattice() {
            return Err(Error::Argument("grid solver needs every control to carry a lattice frame".into()));
        }
        let mut dirs: Vec<Vec<i32>> = Vec::new();
        let mut frame_dirs: Vec<Vec<usize>> = Vec::new();
        for frame in net.frames() {
            let mut ids = Vec::new();
            for e in &frame.directions {
                let c = canonical(e);
                let id = match dirs.iter().position(|x| *x == c) {
                    Some(id) => id,
                    None => {
                        dirs.push(c);
                        dirs.len() - 1
                    }
                };
                ids.push(id);
            }
            frame_dirs.push(ids);
        }
        let controls = net
            .controls()
            .iter()
            .map(|c| {
                let fid = c.frame_id.expect("lattice control");
                let terms = frame_dirs[fid].iter().copied().zip(c.frame_weights.iter().copied()).collect();
                CompiledControl { terms, kappa: c.kappa }
            })
            .collect();
        let stencils = Stencils::build(problem, dirs, BoundaryTreatment::CutCell);
        let gpow = stencils.interior.iter().map(|&i| rhs_power(problem.g[i], problem.m)).collect();
        Ok(Self { problem, stencils, controls, gpow })
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.stencils.interior
    }

    pub fn control_count(&self) -> usize {
        self.controls.len()
    }

    /// Interior position of a node index.
    pub fn position(&self, node: usize) -> Option<usize> {
        match self.stencils.slot.get(node) {
            Some(&p) if p != u32::MAX => Some(p as usize),
            _ => None,
        }
    }

    pub(crate) fn control_terms(&self, j: usize) -> (&[(usize, T)], T) {
        (&self.controls[j].terms, self.controls[j].kappa)
    }

    pub(crate) fn rhs_power_at(&self, pos: usize) -> T {
        self.gpow[pos]
    }

    /// Value of control `j` at position `pos`: `L^w u + f(w, x)`.
    pub fn control_value(&self, u: &[T], pos: usize, j: usize) -> T {
        let c = &self.controls[j];
        let mut acc = -c.kappa * self.gpow[pos];
        for &(k, mu) in &c.terms {
            acc = acc + mu * self.stencils.second_diff(u, pos, k);
        }
        acc
    }

    /// `min_j [L^{w_j} u + f(w_j, x)]` and its lowest minimizing index.
    pub fn bellman_at(&self, u: &[T], pos: usize) -> (T, usize) {
        let diffs: Vec<T> = (0..self.stencils.dirs.len()).map(|k| self.stencils.second_diff(u, pos, k)).collect();
        let g = self.gpow[pos];
        let mut best = (T::infinity(), 0);
        for (j, c) in self.controls.iter().enumerate() {
            let mut acc = -c.kappa * g;
            for &(k, mu) in &c.terms {
                acc = acc + mu * diffs[k];
            }
            if acc < best.0 {
                best = (acc, j);
            }
        }
        best
    }

    /// [`Scheme::bellman_at`] at every interior position.
    pub fn bellman_all(&self, u: &[T]) -> Vec<(T, usize)> {
        (0..self.stencils.interior.len()).into_par_iter().map(|pos| self.bellman_at(u, pos)).collect()
    }

    pub(crate) fn assemble(&self, policy: &[usize]) -> LinearSystem<T> {
        let n = self.stencils.interior.len();
        let mut sys = LinearSystem {
            row_ptr: Vec::with_capacity(n + 1),
            cols: Vec::new(),
            weights: Vec::new(),
            diag: Vec::with_capacity(n),
            rhs: Vec::with_capacity(n),
        };
        sys.row_ptr.push(0);
        for pos in 0..n {
            let c = &self.controls[policy[pos]];
            let mut diag = T::zero();
            for &(k, mu) in &c.terms {
                let (cp, cm) = self.stencils.coefficients(pos, k);
                let arms = self.stencils.arms(pos, k);
                for (arm, coef) in arms.iter().zip([cp, cm]) {
                    let w = mu * coef;
                    diag = diag + w;
                    if arm.target != BOUNDARY {
                        sys.cols.push(arm.target);
                        sys.weights.push(w);
                    }
                }
            }
            sys.diag.push(diag);
            sys.rhs.push(-c.kappa * self.gpow[pos]);
            sys.row_ptr.push(sys.cols.len());
        }
        sys
    }
}

/// `min_j [L^{w_j} u + f(w_j, x)]` at one node, with the minimizing control.
pub fn discrete_bellman_operator<T: Real>(scheme: &Scheme<'_, T>, u: &[T], node: usize) -> Result<(T, usize)> {
    let pos = scheme
        .position(node)
        .ok_or_else(|| Error::Argument(format!("node {node} is not an interior node")))?;
    if u.len() != scheme.problem.grid.node_count() {
        return Err(Error::Argument("grid function has the wrong length".into()));
    }
    Ok(scheme.bellman_at(u, pos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellman::build_control_net;
    use crate::solver::{build_problem, Domain, ProblemConfig, RhsSpec};

    fn problem(d: usize, m: usize, n: usize, rhs: RhsSpec) -> GridProblem<f64> {
        build_problem(&ProblemConfig { domain: Domain::Ball, d, m, h: 2.0 / n as f64, rhs, k_budget: 1.0 }).unwrap()
    }

    fn centre(p: &GridProblem<f64>) -> usize {
        let n = p.grid.intervals();
        p.grid.linear_index(&vec![n / 2; p.dim()])
    }

    #[test]
    fn quadratic_is_exact_for_isotropic_control() {
        for (d, m) in [(2, 2), (3, 2), (3, 3)] {
            let c = crate::scalar::binomial::<f64>(d, m).powf(1.0 / (m as f64 - 1.0));
            let p = problem(d, m, 16, RhsSpec::Constant(c));
            let net = build_control_net::<f64>(d, m, 2, 4, 3).unwrap();
            let s = Scheme::new(&p, &net).unwrap();
            let u: Vec<f64> = (0..p.grid.node_count())
                .map(|i| p.grid.coords(i).iter().map(|x| x * x).sum::<f64>() / 2.0)
                .collect();
            let (value, arg) = discrete_bellman_operator(&s, &u, centre(&p)).unwrap();
            assert!(value.abs() < 1e-12, "d={d} m={m}: {value}");
            assert_eq!(arg, 0);
        }
    }

    #[test]
    fn zero_function_values() {
        let p = problem(2, 2, 8, RhsSpec::Constant(0.0));
        let net = build_control_net::<f64>(2, 2, 4, 4, 1).unwrap();
        let s = Scheme::new(&p, &net).unwrap();
        let u = vec![0.0; p.grid.node_count()];
        let pos = s.position(centre(&p)).unwrap();
        for j in 0..s.control_count() {
            assert_eq!(s.control_value(&u, pos, j), 0.0);
        }
        let p = problem(2, 2, 8, RhsSpec::Constant(1.0));
        let s = Scheme::new(&p, &net).unwrap();
        let (value, arg) = discrete_bellman_operator(&s, &u, centre(&p)).unwrap();
        assert!((value + 1.0).abs() < 1e-14);
        assert_eq!(arg, 0);
    }

    #[test]
    fn operator_is_monotone_in_neighbours() {
        let p = problem(2, 2, 16, RhsSpec::Constant(1.0));
        let net = build_control_net::<f64>(2, 2, 8, 6, 5).unwrap();
        let s = Scheme::new(&p, &net).unwrap();
        let mut u: Vec<f64> = (0..p.grid.node_count()).map(|i| ((i * 37) % 11) as f64 * -0.01).collect();
        for &i in s.interior_nodes() {
            let pos = s.position(i).unwrap();
            let before = s.bellman_at(&u, pos).0;
            let neighbour = s.interior_nodes()[(pos * 7 + 3) % s.interior_nodes().len()];
            if neighbour == i {
                continue;
            }
            u[neighbour] += 0.05;
            assert!(s.bellman_at(&u, pos).0 >= before - 1e-12);
            u[neighbour] -= 0.05;
        }
    }

    #[test]
    fn cut_cell_arms_end_on_boundary() {
        let p = problem(2, 2, 8, RhsSpec::Constant(1.0));
        let st = Stencils::build(&p, vec![vec![1, 0], vec![2, 1]], BoundaryTreatment::CutCell);
        let h = p.spacing();
        for (pos, &i) in st.interior.iter().enumerate() {
            let x = p.grid.coords(i);
            for k in 0..2 {
                let e = &st.dirs[k];
                let len = ((e[0] * e[0] + e[1] * e[1]) as f64).sqrt();
                for (arm, sign) in st.arms(pos, k).iter().zip([1.0, -1.0]) {
                    assert!(arm.dist > 0.0 && arm.dist <= h * len + 1e-15);
                    if arm.target == BOUNDARY {
                        let y: Vec<f64> =
                            (0..2).map(|c| x[c] + sign * arm.dist * e[c] as f64 / len).collect();
                        assert!(Domain::Ball.distance(&y).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn operator_argument_errors() {
        let p = problem(2, 2, 8, RhsSpec::Constant(1.0));
        let net3 = build_control_net::<f64>(3, 2, 1, 2, 1).unwrap();
        assert!(matches!(Scheme::new(&p, &net3), Err(Error::Argument(_))));
        let net = build_control_net::<f64>(2, 2, 1, 2, 1).unwrap();
        let free = crate::bellman::Control::new(&SymMat::from_diag(&[2.0, 1.0]), 2).unwrap();
        assert!(matches!(Scheme::new(&p, &net.clone().with_control(free)), Err(Error::Argument(_))));
        let s = Scheme::new(&p, &net).unwrap();
        let u = vec![0.0; p.grid.node_count()];
        assert!(matches!(discrete_bellman_operator(&s, &u, 0), Err(Error::Argument(_))));
        assert!(matches!(discrete_bellman_operator(&s, &u[1..], centre(&p)), Err(Error::Argument(_))));
    }

    #[test]
    fn hessian_of_quadratic() {
        let p = problem(3, 2, 8, RhsSpec::Constant(1.0));
        let st = Stencils::build(&p, hessian_directions(3), BoundaryTreatment::Nodal);
        let u: Vec<f64> = (0..p.grid.node_count())
            .map(|i| {
                let x = p.grid.coords(i);
                x[0] * x[0] + 3.0 * x[0] * x[1] - x[1] * x[2]
            })
            .collect();
        let pos = st.slot[centre(&p)] as usize;
        let hess = discrete_hessian(&st, &u, pos, 3);
        let expected = SymMat::from_rows(&[vec![2.0, 3.0, 0.0], vec![3.0, 0.0, -1.0], vec![0.0, -1.0, 0.0]]).unwrap();
        assert!(hess.sub(&expected).max_abs() < 1e-12);
    }
}
