//! Elementary symmetric functions of spectra, `P_m` of symmetric matrices,
//! and the gradient matrix `K(v) = (dP_m / dv_ij)`.

pub mod jacobi;
pub mod matrix;

pub use jacobi::{eigen, spectrum};
pub use matrix::{Eigen, Spectrum, Square, SymMat};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// All elementary symmetric polynomials `P_0, ..., P_n` of `values`.
///
/// Accumulates one value at a time (`e_k <- e_k + x e_{k-1}`), which only
/// ever adds products of inputs and avoids the cancellation that the
/// power-sum route suffers.
pub fn elem_sym_all<T: Real>(values: &[T]) -> Vec<T> {
    let n = values.len();
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for (seen, &x) in values.iter().enumerate() {
        for k in (1..=seen + 1).rev() {
            e[k] = e[k] + x * e[k - 1];
        }
    }
    e
}

/// `P_k(values)`, with `P_0 = 1`.
pub fn elem_sym<T: Real>(values: &[T], k: usize) -> Result<T> {
    if k > values.len() {
        return Err(Error::Argument(format!("order k = {k} exceeds dimension {}", values.len())));
    }
    Ok(elem_sym_all(values)[k])
}

/// `P_k` of `values` with entry `skip` removed; this is `dP_{k+1} / dx_skip`.
pub fn elem_sym_without<T: Real>(values: &[T], skip: usize, k: usize) -> T {
    let n = values.len();
    if k > n.saturating_sub(1) {
        return T::zero();
    }
    let mut e = vec![T::zero(); n];
    e[0] = T::one();
    let mut seen = 0;
    for (i, &x) in values.iter().enumerate() {
        if i == skip {
            continue;
        }
        seen += 1;
        for j in (1..=seen).rev() {
            e[j] = e[j] + x * e[j - 1];
        }
    }
    e[k]
}

/// `P_k(values)` through Newton's identities on power sums.
///
/// Kept as an independent cross-check of [`elem_sym`]; it loses relative
/// accuracy when the result is small compared to the power sums.
pub fn elem_sym_newton_girard<T: Real>(values: &[T], k: usize) -> Result<T> {
    let n = values.len();
    if k > n {
        return Err(Error::Argument(format!("order k = {k} exceeds dimension {n}")));
    }
    let power: Vec<T> = (0..=k)
        .map(|p| values.iter().map(|&x| x.powi(p as i32)).sum())
        .collect();
    let mut e = vec![T::zero(); k + 1];
    e[0] = T::one();
    for j in 1..=k {
        let mut acc = T::zero();
        for i in 1..=j {
            let term = e[j - i] * power[i];
            acc = if i % 2 == 1 { acc + term } else { acc - term };
        }
        e[j] = acc / T::count(j);
    }
    Ok(e[k])
}

fn check_order(d: usize, m: usize) -> Result<()> {
    if m < 1 || m > d {
        return Err(Error::Argument(format!("order m = {m} must lie in 1..={d}")));
    }
    Ok(())
}

/// `P_m(w) = P_m(lambda(w))`.
pub fn pm_matrix<T: Real>(w: &SymMat<T>, m: usize) -> Result<T> {
    check_order(w.dim(), m)?;
    spectrum(w)?.elem_sym(m)
}

/// Per-eigenvalue partials `dP_m / dlambda_i = P_{m-1}(lambda without lambda_i)`.
pub fn spectral_gradient<T: Real>(values: &[T], m: usize) -> Vec<T> {
    (0..values.len()).map(|i| elem_sym_without(values, i, m - 1)).collect()
}

/// Gradient matrix `K(v) = (dP_m / dv_ij)` assembled spectrally as
/// `Q diag(dP_m / dlambda) Q^T`.
pub fn k_matrix<T: Real>(v: &SymMat<T>, m: usize) -> Result<SymMat<T>> {
    check_order(v.dim(), m)?;
    let e = eigen(v)?;
    let grad = spectral_gradient(e.spectrum.values(), m);
    Ok(e.recompose(&grad))
}

/// Relative tolerance for the two routes in [`directional_linear_coeff`].
pub const DIRECTIONAL_AGREEMENT: f64 = 1e-8;

/// Slope of the affine map `t -> P_m(v + t eta eta^T)`.
///
/// Returns `eta^T K(v) eta` after checking it against the exact secant
/// `(P_m(v + eta eta^T) - P_m(v - eta eta^T)) / 2`.
pub fn directional_linear_coeff<T: Real>(v: &SymMat<T>, eta: &[T], m: usize) -> Result<T> {
    check_order(v.dim(), m)?;
    if eta.len() != v.dim() {
        return Err(Error::Argument("direction length must match the matrix dimension".into()));
    }
    let norm: T = eta.iter().map(|&x| x * x).sum::<T>().sqrt();
    if (norm - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::Argument(format!("direction must be a unit vector, |eta| = {norm}")));
    }
    let spectral = k_matrix(v, m)?.quad_form(eta);
    let rank_one = SymMat::outer(eta);
    let plus = pm_matrix(&v.add(&rank_one), m)?;
    let minus = pm_matrix(&v.sub(&rank_one), m)?;
    let secant = (plus - minus) / T::lit(2.0);
    let scale = T::one() + spectral.abs() + plus.abs() + minus.abs();
    if (spectral - secant).abs() > T::tol(DIRECTIONAL_AGREEMENT) * scale {
        return Err(Error::CrossCheck(format!(
            "spectral slope {spectral} disagrees with secant slope {secant}"
        )));
    }
    Ok(spectral)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn elem_sym_examples() {
        assert_eq!(elem_sym(&[1.0, 1.0, 1.0], 2).unwrap(), 3.0);
        assert_eq!(elem_sym(&[1.0, 2.0, 3.0], 2).unwrap(), 11.0);
        assert_eq!(elem_sym(&[1.0, 2.0, 3.0], 0).unwrap(), 1.0);
        assert!(matches!(elem_sym(&[1.0, 2.0], 3), Err(Error::Argument(_))));
    }

    #[test]
    fn without_matches_brute_force() {
        let v = [0.5, -1.25, 2.0, 3.5];
        for skip in 0..4 {
            let rest: Vec<f64> = v.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x).collect();
            for k in 0..4 {
                assert!(close(elem_sym_without(&v, skip, k), elem_sym(&rest, k).unwrap(), 1e-15));
            }
        }
    }

    #[test]
    fn pm_matrix_examples() {
        assert!(close(pm_matrix(&SymMat::<f64>::identity(3), 2).unwrap(), 3.0, 1e-14));
        assert!(close(pm_matrix(&SymMat::<f64>::from_diag(&[1.0, 2.0, 3.0]), 3).unwrap(), 6.0, 1e-14));
        let q = Square::rotation(2, 0, 1, std::f64::consts::PI / 6.0);
        let w = SymMat::<f64>::from_diag(&[1.0, 2.0]).conjugate(&q);
        assert!(close(pm_matrix(&w, 2).unwrap(), 2.0, 1e-13));
    }

    #[test]
    fn order_out_of_range() {
        let w = SymMat::<f64>::identity(3);
        assert!(matches!(pm_matrix(&w, 4), Err(Error::Argument(_))));
        assert!(matches!(k_matrix(&w, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn k_matrix_examples() {
        for d in 2..=6 {
            let k = k_matrix(&SymMat::<f64>::identity(d), d).unwrap();
            for i in 0..d {
                for j in 0..d {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((k.get(i, j) - want).abs() < 1e-13);
                }
            }
        }
        let k = k_matrix(&SymMat::<f64>::identity(3), 2).unwrap();
        assert!((k.get(1, 1) - 2.0).abs() < 1e-13 && k.get(0, 1).abs() < 1e-13);
        let k = k_matrix(&SymMat::<f64>::from_diag(&[1.0, 2.0, 3.0]), 2).unwrap();
        for (i, want) in [5.0, 4.0, 3.0].into_iter().enumerate() {
            assert!((k.get(i, i) - want).abs() < 1e-13);
        }
        assert!((k.trace() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn directional_examples() {
        let e1 = [1.0f64, 0.0, 0.0];
        let e3 = [0.0, 0.0, 1.0];
        let s = directional_linear_coeff(&SymMat::identity(3), &e1, 2).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
        let s = directional_linear_coeff(&SymMat::<f64>::from_diag(&[1.0, 2.0, 3.0]), &e3, 2).unwrap();
        assert!((s - 3.0).abs() < 1e-12);
        assert!(matches!(
            directional_linear_coeff(&SymMat::identity(3), &[1.0, 1.0, 0.0], 2),
            Err(Error::Argument(_))
        ));
    }
}
