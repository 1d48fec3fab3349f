//! Garding cone `C_m`: membership, closure tests, the boundary shift along
//! the identity, and the principal-submatrix property.
//!
//! Membership is decided by positivity of `P_1, ..., P_m` on the spectrum.
//! Margins are reported after dividing the spectrum by its `l1` norm, so they
//! are comparable across scales.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symfun::{elem_sym_all, spectrum, SymMat};

/// Strict-interior threshold on the normalized margin.
pub const INTERIOR_MARGIN: f64 = 1e-12;
/// Closure threshold on the normalized margin.
pub const CLOSURE_MARGIN: f64 = -1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeVerdict<T> {
    pub inside: bool,
    /// `min_{1 <= k <= m} P_k(lambda / |lambda|_1)`.
    pub margin: T,
    /// Largest root `t0` of `t -> P_m(lambda + t)`.
    pub boundary_distance_t: T,
}

fn check_order(d: usize, m: usize) -> Result<()> {
    if m < 1 || m > d {
        return Err(Error::Argument(format!("cone order m = {m} must lie in 1..={d}")));
    }
    Ok(())
}

/// `min_{1 <= k <= m} P_k(lambda / s)` with `s = |lambda|_1`; zero for the zero spectrum.
pub fn normalized_margin<T: Real>(lambda: &[T], m: usize) -> T {
    let scale: T = lambda.iter().map(|x| x.abs()).sum();
    if scale == T::zero() {
        return T::zero();
    }
    let normalized: Vec<T> = lambda.iter().map(|&x| x / scale).collect();
    let p = elem_sym_all(&normalized);
    p[1..=m].iter().fold(T::infinity(), |acc, &x| acc.min(x))
}

/// Raw `P_k > 0` for every `k <= m`, no tolerance.
pub fn spectrum_in_cone<T: Real>(lambda: &[T], m: usize) -> bool {
    let p = elem_sym_all(lambda);
    p[1..=m].iter().all(|&x| x > T::zero())
}

/// Membership verdict for a spectrum.
pub fn classify_spectrum<T: Real>(lambda: &[T], m: usize) -> Result<ConeVerdict<T>> {
    check_order(lambda.len(), m)?;
    let margin = normalized_margin(lambda, m);
    Ok(ConeVerdict {
        inside: margin > T::lit(INTERIOR_MARGIN),
        margin,
        boundary_distance_t: root_along_identity(lambda, m)?,
    })
}

pub fn in_cone<T: Real>(w: &SymMat<T>, m: usize) -> Result<ConeVerdict<T>> {
    check_order(w.dim(), m)?;
    classify_spectrum(spectrum(w)?.values(), m)
}

/// Closure margin of `w + tol I`, the quantity thresholded by [`admissible`].
pub fn admissibility_margin<T: Real>(w: &SymMat<T>, m: usize, tol: T) -> Result<T> {
    check_order(w.dim(), m)?;
    if tol < T::zero() {
        return Err(Error::Argument("admissibility tolerance must be nonnegative".into()));
    }
    let shifted = spectrum(w)?.shifted(tol);
    Ok(normalized_margin(shifted.values(), m))
}

/// Whether `w` lies in the closure of `C_m`, up to the shift `tol I` and the
/// closure threshold on the normalized margin.
pub fn admissible<T: Real>(w: &SymMat<T>, m: usize, tol: T) -> Result<bool> {
    Ok(admissibility_margin(w, m, tol)? >= T::lit(CLOSURE_MARGIN))
}

const ROOT_BISECTIONS: usize = 200;

/// Largest real root of `t -> P_m(lambda + t 1)`.
///
/// `lambda + t` is in the cone exactly for `t > t0`, so the root is found by
/// bisecting that predicate inside `[-(1 + |lambda|_inf), 1 + |lambda|_inf]`.
pub fn root_along_identity<T: Real>(lambda: &[T], m: usize) -> Result<T> {
    check_order(lambda.len(), m)?;
    let reach = T::one() + lambda.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    let (mut lo, mut hi) = (-reach, reach);
    let member = |t: T| {
        let shifted: Vec<T> = lambda.iter().map(|&x| x + t).collect();
        spectrum_in_cone(&shifted, m)
    };
    if !member(hi) || member(lo) {
        return Err(Error::Numeric("cone root bracket is invalid".into()));
    }
    for _ in 0..ROOT_BISECTIONS {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if member(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Shift `t0` with `w + t I` in `C_m` for all `t > t0` and `P_m(w + t0 I) = 0`.
pub fn cone_root<T: Real>(w: &SymMat<T>, m: usize) -> Result<T> {
    check_order(w.dim(), m)?;
    root_along_identity(spectrum(w)?.values(), m)
}

/// Every principal `(d-1) x (d-1)` submatrix lies in `C_{m-1}`.
///
/// For `m = 1` the statement is vacuous and the check returns `true`.
pub fn submatrix_cone_check<T: Real>(w: &SymMat<T>, m: usize) -> Result<bool> {
    check_order(w.dim(), m)?;
    if m == 1 || w.dim() < 2 {
        return Ok(true);
    }
    for k in 0..w.dim() {
        if !in_cone(&w.principal_minor(k), m - 1)?.inside {
            return Ok(false);
        }
    }
    Ok(true)
}
