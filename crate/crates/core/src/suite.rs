//! Randomized property batteries over the algebra, Bellman and
//! quasiconvexity layers. Each check draws its own seeded stream, so a
//! battery is reproducible and its checks run in parallel.

use rand::Rng;
use rayon::prelude::*;

use crate::bellman::{aligned_control, bellman_residual, build_control_net, normalized_coeff, ControlNet};
use crate::cone::{in_cone, normalized_margin, root_along_identity, INTERIOR_MARGIN};
use crate::error::Result;
use crate::quasi::{
    f_k_quasiconvexity_check, g_value, quasiconvexity_check, PowerFamily, ViolationReport, WeightVector,
};
use crate::sampling::{cone_member, log_uniform, orthogonal, rng_from_seed, symmetric, unit_vector, weights};
use crate::scalar::binomial;
use crate::symfun::{
    directional_linear_coeff, elem_sym_all, elem_sym_newton_girard, k_matrix, pm_matrix, spectrum, SymMat,
};

type Rng64 = rand_chacha::ChaCha8Rng;
type Check = fn(usize, u64) -> Result<ViolationReport>;

/// `(d, m)` for case `i`: `d` cycles through `2..=6`, `m` through `1..=d`.
fn shape(i: usize) -> (usize, usize) {
    let d = 2 + i % 5;
    (d, 1 + (i / 5) % d)
}

/// Same with `m >= 2`.
fn shape2(i: usize) -> (usize, usize) {
    let d = 2 + i % 5;
    (d, 2 + (i / 5) % (d - 1))
}

fn rel(err: f64, scale: f64) -> f64 {
    -err.abs() / scale.abs().max(1.0)
}

fn run(label: &str, cases: usize, seed: u64, tol: f64, mut case: impl FnMut(usize, &mut Rng64) -> Result<f64>) -> Result<ViolationReport> {
    let mut rng = rng_from_seed(seed);
    let mut report = ViolationReport::new(label, seed);
    for i in 0..cases {
        let slack = case(i, &mut rng)?;
        report.record(slack, tol);
    }
    Ok(report)
}

fn margin(w: &SymMat<f64>, m: usize) -> Result<f64> {
    Ok(normalized_margin(spectrum(w)?.values(), m))
}

pub fn trace_identity(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("trace identity Tr K = (d-m+1) P_{m-1}", cases, seed, 1e-10, |i, rng| {
        let (d, m) = shape(i);
        let v = symmetric::<f64, _>(rng, d);
        let lhs = k_matrix(&v, m)?.trace();
        let rhs = (d - m + 1) as f64 * elem_sym_all(spectrum(&v)?.values())[m - 1];
        Ok(rel(lhs - rhs, rhs))
    })
}

pub fn orthogonal_equivariance(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("orthogonal invariance of P_m, equivariance of K and a", cases, seed, 1e-9, |i, rng| {
        let (d, m) = shape2(i);
        let w = cone_member::<f64, _>(rng, d, m)?;
        let q = orthogonal::<f64, _>(rng, d);
        let rotated = w.conjugate(&q);
        let p = pm_matrix(&w, m)?;
        let invariance = rel(pm_matrix(&rotated, m)? - p, 1.0 + p.abs());
        let k = k_matrix(&w, m)?;
        let kq = k_matrix(&rotated, m)?;
        let equivariance = rel(kq.sub(&k.conjugate(&q)).max_abs(), k.max_abs());
        let a = normalized_coeff(&w, m)?;
        let aq = normalized_coeff(&rotated, m)?;
        let a_equivariance = -aq.sub(&a.conjugate(&q)).max_abs();
        Ok(invariance.min(equivariance).min(a_equivariance))
    })
}

pub fn homogeneity(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("homogeneity P_m(s w) = s^m P_m(w)", cases, seed, 1e-10, |i, rng| {
        let (d, m) = shape(i);
        let w = symmetric::<f64, _>(rng, d);
        let s = log_uniform(rng, 0.1, 10.0);
        let lhs = pm_matrix(&w.scaled(s), m)?;
        let rhs = s.powi(m as i32) * pm_matrix(&w, m)?;
        let scale = elem_sym_all(&spectrum(&w)?.values().iter().map(|x| x.abs() * s).collect::<Vec<_>>())[m];
        Ok(rel(lhs - rhs, scale))
    })
}

pub fn newton_girard_agreement(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("Newton-Girard vs subset expansion", cases, seed, 1e-11, |i, rng| {
        let (d, _) = shape(i);
        let values: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let direct = elem_sym_all(&values);
        let abs: Vec<f64> = values.iter().map(|x| x.abs()).collect();
        let scale = elem_sym_all(&abs);
        let mut worst = 0.0f64;
        for k in 0..=d {
            let ng = elem_sym_newton_girard(&values, k)?;
            worst = worst.min(rel(ng - direct[k], scale[k]));
        }
        Ok(worst)
    })
}

pub fn superadditivity(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("superadditivity P_m(v + w) >= P_m(v) + P_m(w)", cases, seed, 1e-10, |i, rng| {
        let (d, m) = shape(i);
        let v = cone_member::<f64, _>(rng, d, m)?;
        let w = cone_member::<f64, _>(rng, d, m)?;
        let total = pm_matrix(&v.add(&w), m)?;
        let parts = pm_matrix(&v, m)? + pm_matrix(&w, m)?;
        Ok((total - parts) / total.abs().max(1.0))
    })
}

pub fn cone_nesting(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("cone nesting C_m inside C_k for k < m", cases, seed, 0.0, |i, rng| {
        let (d, m) = shape(i);
        let w = cone_member::<f64, _>(rng, d, m)?;
        let mut worst = f64::INFINITY;
        for k in 1..=m {
            worst = worst.min(margin(&w, k)? - INTERIOR_MARGIN);
        }
        Ok(worst)
    })
}

pub fn submatrix_property(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("principal submatrices of C_m lie in C_{m-1}", cases, seed, 0.0, |i, rng| {
        let (d, m) = shape2(i);
        let w = cone_member::<f64, _>(rng, d, m)?;
        let mut worst = f64::INFINITY;
        for k in 0..d {
            worst = worst.min(margin(&w.principal_minor(k), m - 1)? - INTERIOR_MARGIN);
        }
        Ok(worst)
    })
}

pub fn ray_connectivity(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("segment to the identity stays in the cone", cases, seed, 0.0, |i, rng| {
        let (d, m) = shape(i);
        let w = cone_member::<f64, _>(rng, d, m)?;
        let id = SymMat::identity(d);
        let mut worst = f64::INFINITY;
        for step in 0..100 {
            let s = step as f64 / 99.0;
            let p = id.scaled(1.0 - s).add(&w.scaled(s));
            worst = worst.min(margin(&p, m)?);
        }
        Ok(worst)
    })
}

pub fn convexity_midpoint(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("midpoint of cone members is in the cone", cases, seed, 0.0, |i, rng| {
        let (d, m) = shape(i);
        let a = cone_member::<f64, _>(rng, d, m)?;
        let b = cone_member::<f64, _>(rng, d, m)?;
        Ok(margin(&a.add(&b).scaled(0.5), m)? - INTERIOR_MARGIN)
    })
}

pub fn trace_positivity(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("P_1 > 0 and Tr(K(v) w) > 0 on the cone", cases, seed, 0.0, |i, rng| {
        let (d, m) = shape(i);
        let v = cone_member::<f64, _>(rng, d, m)?;
        let w = cone_member::<f64, _>(rng, d, m)?;
        let k = k_matrix(&v, m)?;
        let pairing = k.dot(&w) / (k.frobenius_norm() * w.frobenius_norm());
        let p1 = w.trace() / w.frobenius_norm();
        Ok(pairing.min(p1))
    })
}

pub fn k_positive_definite(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("K(v) positive definite and eta^T K eta > 0", cases, seed, 0.0, |i, rng| {
        let (d, m) = shape(i);
        let v = cone_member::<f64, _>(rng, d, m)?;
        let k = k_matrix(&v, m)?;
        let lowest = spectrum(&k)?.values()[0] / k.max_abs();
        let eta = unit_vector::<f64, _>(rng, d);
        let slope = directional_linear_coeff(&v, &eta, m)? / k.max_abs();
        Ok(lowest.min(slope))
    })
}

pub fn cone_root_consistency(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("cone root: P_m vanishes there and the cone starts just above", cases, seed, 1e-9, |i, rng| {
        let (d, m) = shape(i);
        let w = symmetric::<f64, _>(rng, d);
        let lambda = spectrum(&w)?;
        let t0 = root_along_identity(lambda.values(), m)?;
        let shifted = lambda.shifted(t0);
        let abs: Vec<f64> = shifted.values().iter().map(|x| x.abs()).collect();
        let value = rel(elem_sym_all(shifted.values())[m], elem_sym_all(&abs)[m]);
        let inside = if in_cone(&w.shifted(t0 + 1e-6), m)?.inside { 0.0 } else { -1.0 };
        Ok(value.min(inside))
    })
}

pub fn log_concavity(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("P_k / C(d,k) log-concave in k", cases, seed, 1e-10, |i, rng| {
        let (d, m) = shape(i);
        let w = cone_member::<f64, _>(rng, d, m)?;
        let p = elem_sym_all(spectrum(&w)?.values());
        let q: Vec<f64> = (0..=m).map(|k| p[k] / binomial::<f64>(d, k)).collect();
        let mut worst = f64::INFINITY;
        for k in 1..m {
            worst = worst.min((q[k] * q[k] - q[k - 1] * q[k + 1]) / (q[k] * q[k]).max(f64::MIN_POSITIVE));
        }
        Ok(if worst.is_finite() { worst } else { 0.0 })
    })
}

pub fn ratio_concavity(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("P_k / P_{k-1} concave on C_m", cases, seed, 1e-9, |i, rng| {
        let (d, m) = shape2(i);
        let a = cone_member::<f64, _>(rng, d, m)?;
        let b = cone_member::<f64, _>(rng, d, m)?;
        let pa = elem_sym_all(spectrum(&a)?.values());
        let pb = elem_sym_all(spectrum(&b)?.values());
        let pm = elem_sym_all(spectrum(&a.add(&b).scaled(0.5))?.values());
        let mut worst = f64::INFINITY;
        for k in 2..=m {
            let avg = 0.5 * (pa[k] / pa[k - 1] + pb[k] / pb[k - 1]);
            let mid = pm[k] / pm[k - 1];
            worst = worst.min((mid - avg) / avg.abs().max(mid.abs()).max(1.0));
        }
        Ok(worst)
    })
}

/// Rescales `w` so that `G(s w, l) = target`; `G` decreases in `s`.
fn scale_to_level(w: &SymMat<f64>, l: &WeightVector<f64>, m: usize, target: f64) -> Result<SymMat<f64>> {
    let p = elem_sym_all(spectrum(w)?.values());
    let level = |s: f64| -> f64 {
        (0..m).map(|k| l.values()[k].powi((m - k) as i32) * s.powi(k as i32 - m as i32) * p[k] / p[m]).sum()
    };
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if level(mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(w.scaled(hi.exp()))
}

pub fn sublevel_convexity(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("sublevel set {G <= 1} is midpoint convex", cases, seed, 1e-9, |i, rng| {
        let (d, m) = shape2(i);
        let la = WeightVector::new(weights(rng, m))?;
        let lb = WeightVector::new(weights(rng, m))?;
        let a = scale_to_level(&cone_member(rng, d, m)?, &la, m, rng.gen_range(0.1..=1.0))?;
        let b = scale_to_level(&cone_member(rng, d, m)?, &lb, m, rng.gen_range(0.1..=1.0))?;
        let mid = g_value(&a.add(&b).scaled(0.5), &la.midpoint(&lb), m)?;
        Ok(1.0 - mid)
    })
}

pub fn f32_smoke(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("single precision agrees with double", cases, seed, 1e-4, |i, rng| {
        let (d, m) = shape(i);
        let w = cone_member::<f64, _>(rng, d, m)?;
        let w32 = SymMat::<f32>::from_fn(d, |r, c| w.get(r, c) as f32);
        let p64 = pm_matrix(&w, m)?;
        let p32 = pm_matrix(&w32, m)? as f64;
        let member = in_cone(&w32, 1)?.inside;
        let scale = elem_sym_all(&spectrum(&w)?.values().iter().map(|x| x.abs()).collect::<Vec<_>>())[m];
        Ok(rel(p32 - p64, scale).min(if member { 0.0 } else { -1.0 }))
    })
}

/// Net used by the Bellman checks: isotropic control plus a few lattice
/// frames and profiles.
fn bellman_net(d: usize, m: usize, seed: u64) -> Result<ControlNet<f64>> {
    let frames = if d == 2 { 4 } else { 3 };
    build_control_net(d, m, frames, 4, seed)
}

pub fn bellman_forward(cases: usize, seed: u64) -> Result<ViolationReport> {
    let nets: Vec<ControlNet<f64>> = (0..cases.min(25))
        .map(|i| {
            let (d, m) = shape2(i);
            bellman_net(d, m, seed)
        })
        .collect::<Result<_>>()?;
    run("Bellman residual at c = P_m(v) is nonnegative", cases, seed, 1e-10, |i, rng| {
        let net = &nets[i % nets.len()];
        let (d, m) = (net.dim(), net.order());
        let v = cone_member::<f64, _>(rng, d, m)?;
        let c = pm_matrix(&v, m)?;
        Ok(bellman_residual(&v, c, net)? / v.trace().max(1.0))
    })
}

pub fn bellman_aligned(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("Bellman residual vanishes with the aligned control", cases, seed, 1e-8, |i, rng| {
        let (d, m) = shape2(i);
        let v = cone_member::<f64, _>(rng, d, m)?;
        let net = bellman_net(d, m, seed)?.with_control(aligned_control(&v, m)?);
        let c = pm_matrix(&v, m)?;
        let r = bellman_residual(&v, c, &net)?;
        Ok(rel(r, v.trace()))
    })
}

pub fn bellman_strict(_cases: usize, seed: u64) -> Result<ViolationReport> {
    run("Bellman residual <= -0.5 for v = I, c = 4", 1, seed, 0.0, |_, _| {
        let net = build_control_net(2, 2, 1, 1, seed)?;
        Ok(-0.5 - bellman_residual(&SymMat::identity(2), 4.0, &net)?)
    })
}

pub fn bellman_refinement(cases: usize, seed: u64) -> Result<ViolationReport> {
    run("refining the net does not increase the residual", cases, seed, 0.0, |i, rng| {
        let (d, m) = shape2(i);
        let coarse = build_control_net(d, m, 1, 3, seed)?;
        let fine = build_control_net(d, m, 3, 3, seed)?;
        let v = cone_member::<f64, _>(rng, d, m)?;
        let c = pm_matrix(&v, m)? * rng.gen_range(0.5..2.0);
        Ok(bellman_residual(&v, c, &coarse)? - bellman_residual(&v, c, &fine)?)
    })
}

fn battery(checks: &[Check], cases: usize, seed: u64) -> Result<Vec<ViolationReport>> {
    checks
        .par_iter()
        .enumerate()
        .map(|(k, check)| check(cases, seed.wrapping_add(k as u64)))
        .collect()
}

/// Cone and symmetric-function properties, `cases` draws each over `d = 2..=6`.
pub fn algebra_suite(cases: usize, seed: u64) -> Result<Vec<ViolationReport>> {
    battery(
        &[
            trace_identity,
            orthogonal_equivariance,
            homogeneity,
            newton_girard_agreement,
            superadditivity,
            cone_nesting,
            submatrix_property,
            ray_connectivity,
            convexity_midpoint,
            trace_positivity,
            k_positive_definite,
            cone_root_consistency,
            log_concavity,
            f32_smoke,
        ],
        cases,
        seed,
    )
}

/// Bellman characterization of `P_m(v) = c` on random cone members.
pub fn bellman_suite(cases: usize, seed: u64) -> Result<Vec<ViolationReport>> {
    battery(&[bellman_forward, bellman_aligned, bellman_strict, bellman_refinement], cases, seed)
}

/// Shapes of the quasiconvexity battery.
pub const QUASI_SHAPES: [(usize, usize); 4] = [(2, 2), (3, 2), (3, 3), (4, 3)];

/// Midpoint quasiconvexity of `G` for each of [`QUASI_SHAPES`], the power
/// family `p = (3, 1.5)`, ratio concavity and sublevel convexity.
pub fn quasi_suite(pairs: usize, seed: u64) -> Result<Vec<ViolationReport>> {
    let mut jobs: Vec<Box<dyn Fn() -> Result<ViolationReport> + Send + Sync>> = QUASI_SHAPES
        .iter()
        .map(|&(d, m)| Box::new(move || quasiconvexity_check(d, m, pairs, seed)) as Box<_>)
        .collect();
    jobs.push(Box::new(move || f_k_quasiconvexity_check(2, &PowerFamily::new(vec![3.0, 1.5])?, pairs, seed)));
    jobs.push(Box::new(move || ratio_concavity(pairs, seed)));
    jobs.push(Box::new(move || sublevel_convexity(pairs, seed)));
    jobs.par_iter().map(|job| job()).collect()
}
