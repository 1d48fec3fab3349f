//! Sampling checkers for the convexity structure behind weighted
//! `m`-Hessian equations:
//!
//! * `G(w, l) = sum_{k<m} l_k^(m-k) P_k(w) / P_m(w)` is quasiconvex on
//!   `C_m x R_+^m`, and so is the variant with `l_k^(m-k)` replaced by any
//!   `f_k(l_k)` whose `(m-k)`-th root is convex;
//! * `H(x, y) = 1 / ((x + y)^n - x^n)` is convex on the open quadrant, and
//!   its lift `l^(n+1) H(x, y)` is jointly convex.
//!
//! Each checker draws seeded random pairs and counts midpoint violations.

use rand::Rng;

use crate::cone::in_cone;
use crate::error::{Error, Result};
use crate::sampling::{cone_member, log_uniform, rng_from_seed, weights};
use crate::scalar::Real;
use crate::symfun::{elem_sym_all, spectrum, SymMat};

/// Relative slack below which a midpoint comparison counts as a violation.
pub const MIDPOINT_TOL: f64 = 1e-9;

/// Nonnegative weights `(l_0, ..., l_{m-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T>(Vec<T>);

impl<T: Real> WeightVector<T> {
    pub fn new(l: Vec<T>) -> Result<Self> {
        if l.iter().any(|&x| !(x >= T::zero()) || !x.is_finite()) {
            return Err(Error::Argument("weights must be finite and nonnegative".into()));
        }
        Ok(Self(l))
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![T::zero(); m])
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| (a + b) / T::lit(2.0)).collect())
    }
}

/// Powers `f_k(s) = s^(p_k)`; valid when `p_k >= m - k`, which keeps
/// `f_k^(1/(m-k))` convex.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFamily {
    exponents: Vec<f64>,
}

impl PowerFamily {
    pub fn new(exponents: Vec<f64>) -> Result<Self> {
        let m = exponents.len();
        for (k, &p) in exponents.iter().enumerate() {
            if !p.is_finite() || p < (m - k) as f64 {
                return Err(Error::Argument(format!(
                    "exponent p_{k} = {p} is below m - k = {}; its root would not be convex",
                    m - k
                )));
            }
        }
        Ok(Self { exponents })
    }

    /// `p_k = m - k`, which turns `G_1` back into `G`.
    pub fn standard(m: usize) -> Self {
        Self { exponents: (0..m).map(|k| (m - k) as f64).collect() }
    }

    pub fn order(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    fn apply<T: Real>(&self, k: usize, s: T) -> T {
        let p = self.exponents[k];
        if p.fract() == 0.0 {
            s.powi(p as i32)
        } else {
            s.powf(T::lit(p))
        }
    }
}

/// Outcome of a batch of randomized midpoint tests.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub label: String,
    pub seed: u64,
    pub cases: usize,
    pub violations: usize,
    /// Smallest relative slack seen; negative values beyond the tolerance
    /// are violations.
    pub worst_slack: f64,
}

impl ViolationReport {
    pub(crate) fn new(label: impl Into<String>, seed: u64) -> Self {
        Self { label: label.into(), seed, cases: 0, violations: 0, worst_slack: f64::INFINITY }
    }

    pub(crate) fn record(&mut self, relative_slack: f64, tol: f64) {
        self.cases += 1;
        if relative_slack < -tol || !relative_slack.is_finite() {
            self.violations += 1;
        }
        self.worst_slack = self.worst_slack.min(relative_slack);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn family_sum<T: Real>(w: &SymMat<T>, l: &WeightVector<T>, family: &PowerFamily) -> Result<T> {
    let m = family.order();
    if l.values().len() != m {
        return Err(Error::Argument(format!("expected {m} weights, got {}", l.values().len())));
    }
    if !in_cone(w, m)?.inside {
        return Err(Error::Domain(format!("G is only defined on the cone C_{m}")));
    }
    let p = elem_sym_all(spectrum(w)?.values());
    let mut acc = T::zero();
    for k in 0..m {
        acc = acc + family.apply(k, l.values()[k]) * p[k] / p[m];
    }
    Ok(acc)
}

/// `G(w, l) = sum_{k<m} l_k^(m-k) P_k(w) / P_m(w)`.
pub fn g_value<T: Real>(w: &SymMat<T>, l: &WeightVector<T>, m: usize) -> Result<T> {
    family_sum(w, l, &PowerFamily::standard(m))
}

/// `G_1(w, l) = sum_{k<m} f_k(l_k) P_k(w) / P_m(w)`.
pub fn g1_value<T: Real>(w: &SymMat<T>, l: &WeightVector<T>, family: &PowerFamily) -> Result<T> {
    family_sum(w, l, family)
}

/// Relative midpoint slack `max(G(a), G(b)) - G(mid)` of one pair.
pub fn midpoint_slack<T: Real>(
    (w, l): (&SymMat<T>, &WeightVector<T>),
    (wt, lt): (&SymMat<T>, &WeightVector<T>),
    family: &PowerFamily,
) -> Result<f64> {
    let ga = family_sum(w, l, family)?.to_f64_lossy();
    let gb = family_sum(wt, lt, family)?.to_f64_lossy();
    let mid_w = w.add(wt).scaled(T::lit(0.5));
    let gm = family_sum(&mid_w, &l.midpoint(lt), family)?.to_f64_lossy();
    let top = ga.max(gb);
    Ok((top - gm) / top.abs().max(1.0))
}

fn family_check(d: usize, family: &PowerFamily, pair_count: usize, seed: u64, label: String) -> Result<ViolationReport> {
    let m = family.order();
    if pair_count == 0 {
        return Err(Error::Argument("pair count must be at least 1".into()));
    }
    if m < 2 || m > d {
        return Err(Error::Argument(format!("order m = {m} must lie in 2..={d}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut report = ViolationReport::new(label, seed);
    for _ in 0..pair_count {
        let w: SymMat<f64> = cone_member(&mut rng, d, m)?;
        let wt: SymMat<f64> = cone_member(&mut rng, d, m)?;
        let l = WeightVector::new(weights(&mut rng, m))?;
        let lt = WeightVector::new(weights(&mut rng, m))?;
        report.record(midpoint_slack((&w, &l), (&wt, &lt), family)?, MIDPOINT_TOL);
    }
    Ok(report)
}

/// Midpoint quasiconvexity of `G` over `pair_count` random pairs in
/// `C_m x R_+^m` (dimension `d`).
pub fn quasiconvexity_check(d: usize, m: usize, pair_count: usize, seed: u64) -> Result<ViolationReport> {
    family_check(d, &PowerFamily::standard(m), pair_count, seed, format!("quasiconvexity G d={d} m={m}"))
}

/// Same midpoint test for `G_1` built from a power family.
pub fn f_k_quasiconvexity_check(
    d: usize,
    family: &PowerFamily,
    pair_count: usize,
    seed: u64,
) -> Result<ViolationReport> {
    let m = family.order();
    family_check(d, family, pair_count, seed, format!("quasiconvexity G1 d={d} m={m} p={:?}", family.exponents()))
}

/// `1 / ((x + y)^n - x^n)`.
pub fn scalar_h(n: f64, x: f64, y: f64) -> f64 {
    1.0 / ((x + y).powf(n) - x.powf(n))
}

/// `l^(n+1) / ((x + y)^n - x^n)`.
pub fn lifted_h(n: f64, x: f64, y: f64, l: f64) -> f64 {
    l.powf(n + 1.0) * scalar_h(n, x, y)
}

/// Step of the central second differences in [`scalar_convexity_check`].
pub const FD_STEP: f64 = 1e-3;
/// Floor for the smallest finite-difference Hessian eigenvalue.
pub const FD_EIGEN_FLOOR: f64 = -1e-7;

/// Smallest eigenvalue of the central-difference Hessian of `H` at `(x, y)`.
pub fn fd_hessian_min_eigen(n: f64, x: f64, y: f64) -> f64 {
    let h = FD_STEP;
    let f = |a: f64, b: f64| scalar_h(n, a, b);
    let c = f(x, y);
    let hxx = (f(x + h, y) - 2.0 * c + f(x - h, y)) / (h * h);
    let hyy = (f(x, y + h) - 2.0 * c + f(x, y - h)) / (h * h);
    let hxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
    let mean = 0.5 * (hxx + hyy);
    let radius = (0.25 * (hxx - hyy) * (hxx - hyy) + hxy * hxy).sqrt();
    mean - radius
}

/// Convexity of `H` on a `grid x grid` lattice of `(0, 10]^2` via
/// finite-difference Hessians, plus `grid^2` random midpoint tests of the
/// lifted function in `(x, y, l)`.
pub fn scalar_convexity_check(n: f64, grid: usize, seed: u64) -> Result<(ViolationReport, ViolationReport)> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Argument(format!("exponent n must be positive, got {n}")));
    }
    if grid == 0 {
        return Err(Error::Argument("grid must have at least one point per axis".into()));
    }
    let mut hessian = ViolationReport::new(format!("convexity of H n={n}"), seed);
    for i in 1..=grid {
        for j in 1..=grid {
            let x = 10.0 * i as f64 / grid as f64;
            let y = 10.0 * j as f64 / grid as f64;
            // Keep the stencil inside the open quadrant.
            let x = x.max(2.0 * FD_STEP);
            let y = y.max(2.0 * FD_STEP);
            let lam = fd_hessian_min_eigen(n, x, y);
            hessian.record(lam, -FD_EIGEN_FLOOR);
        }
    }

    let mut lift = ViolationReport::new(format!("joint convexity of l^(n+1) H n={n}"), seed);
    let mut rng = rng_from_seed(seed);
    for _ in 0..grid * grid {
        let mut draw = || {
            (
                log_uniform(&mut rng, 1e-2, 10.0),
                log_uniform(&mut rng, 1e-2, 10.0),
                rng.gen_range(0.0..10.0),
            )
        };
        let a = draw();
        let b = draw();
        lift.record(lift_midpoint_slack(n, a, b), MIDPOINT_TOL);
    }
    Ok((hessian, lift))
}

/// Relative slack `(F(a) + F(b)) / 2 - F(mid)` of the lifted function.
pub fn lift_midpoint_slack(n: f64, a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    let fa = lifted_h(n, a.0, a.1, a.2);
    let fb = lifted_h(n, b.0, b.1, b.2);
    let fm = lifted_h(n, 0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1), 0.5 * (a.2 + b.2));
    (0.5 * (fa + fb) - fm) / fa.max(fb).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_examples() {
        let id = SymMat::<f64>::identity(2);
        assert_eq!(g_value(&id, &WeightVector::zeros(2), 2).unwrap(), 0.0);
        let g = g_value(&id, &WeightVector::new(vec![1.0, 1.0]).unwrap(), 2).unwrap();
        assert!((g - 3.0).abs() < 1e-14);
        let g = g_value(&SymMat::<f64>::from_diag(&[1.0, 3.0]), &WeightVector::new(vec![0.0, 2.0]).unwrap(), 2).unwrap();
        assert!((g - 8.0 / 3.0).abs() < 1e-14);
        assert!(matches!(
            g_value(&SymMat::<f64>::from_diag(&[1.0, -3.0]), &WeightVector::zeros(2), 2),
            Err(Error::Domain(_))
        ));
        assert!(WeightVector::new(vec![1.0, -0.1]).is_err());
    }

    #[test]
    fn identical_and_zero_pairs() {
        let w = SymMat::<f64>::from_diag(&[0.5, 2.0, 1.0]);
        let l = WeightVector::new(vec![0.3, 1.0]).unwrap();
        let fam = PowerFamily::standard(2);
        assert_eq!(midpoint_slack((&w, &l), (&w, &l), &fam).unwrap(), 0.0);
        let z = WeightVector::zeros(2);
        let wt = SymMat::<f64>::from_diag(&[1.5, 0.2, 1.0]);
        assert_eq!(midpoint_slack((&w, &z), (&wt, &z), &fam).unwrap(), 0.0);
        let fam = PowerFamily::new(vec![3.0, 1.5]).unwrap();
        assert_eq!(midpoint_slack((&w, &z), (&wt, &z), &fam).unwrap(), 0.0);
    }

    #[test]
    fn power_family_validation() {
        assert!(PowerFamily::new(vec![3.0, 1.5]).is_ok());
        assert!(matches!(PowerFamily::new(vec![1.5, 1.0]), Err(Error::Argument(_))));
        assert!(matches!(PowerFamily::new(vec![3.0, 0.5]), Err(Error::Argument(_))));
    }

    #[test]
    fn standard_family_reproduces_g_check() {
        let a = quasiconvexity_check(3, 2, 200, 9).unwrap();
        let b = f_k_quasiconvexity_check(3, &PowerFamily::standard(2), 200, 9).unwrap();
        assert_eq!((a.cases, a.violations, a.worst_slack), (b.cases, b.violations, b.worst_slack));
    }

    #[test]
    fn small_batches_pass() {
        assert!(quasiconvexity_check(2, 2, 500, 1).unwrap().passed());
        let fam = PowerFamily::new(vec![3.0, 1.5]).unwrap();
        assert!(f_k_quasiconvexity_check(2, &fam, 500, 1).unwrap().passed());
    }

    #[test]
    fn scalar_convexity_examples() {
        for n in [1.0, 2.0, 3.7, 6.0] {
            let (h, lift) = scalar_convexity_check(n, 50, 1).unwrap();
            assert!(h.passed(), "{h:?}");
            assert!(lift.passed(), "{lift:?}");
        }
        assert_eq!(lift_midpoint_slack(2.0, (1.0, 2.0, 3.0), (1.0, 2.0, 3.0)), 0.0);
        assert!(scalar_convexity_check(0.0, 10, 1).is_err());
    }

    #[test]
    fn fractional_exponent_is_not_convex() {
        // For n < 1, H ~ 2 sqrt(x) / y at large x, which is concave in x.
        let (h, _) = scalar_convexity_check(0.5, 20, 1).unwrap();
        assert!(h.violations > 0);
        assert!(fd_hessian_min_eigen(0.5, 9.0, 0.5) < 0.0);
    }

    #[test]
    fn n_one_is_reciprocal() {
        assert!((scalar_h(1.0, 4.0, 0.5) - 2.0).abs() < 1e-12);
    }
}
