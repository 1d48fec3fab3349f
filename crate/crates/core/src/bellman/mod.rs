//! Linear-operator form of `P_m(v) = c`.
//!
//! For `v` in the closed cone, `P_m(v) = c` holds exactly when
//!
//! ```text
//! inf_{w in C_m} [ Tr(a(w) v) - kappa(w) c^(1/m) ] = 0,
//! a(w)     = K(w) / Tr K(w),
//! kappa(w) = m / (d - m + 1) * P_m(w)^(1 - 1/m) / P_{m-1}(w),
//! ```
//!
//! and the infimum is attained at `w = v`. Both `a` and `kappa` are ratios
//! of equal-degree homogeneous functions, so controls are stored on the
//! slice `Tr w = 1`. The free term of the PDE is `f(w, x) = -kappa(w) g^(1 - 1/m)(x)`.

mod net;

pub use net::{build_control_net, eigen_profiles, lattice_frames, ControlNet, Frame, PROFILE_MARGIN};

use crate::cone::{classify_spectrum, spectrum_in_cone};
use crate::error::{Error, Result};
use crate::scalar::{root_m, Real};
use crate::symfun::{eigen, elem_sym_all, spectral_gradient, Eigen, SymMat};

/// One element of a control net.
#[derive(Debug, Clone, PartialEq)]
pub struct Control<T> {
    /// Cone matrix, normalized to unit trace. Kept for diagnostics.
    pub w: SymMat<T>,
    /// Normalized coefficient matrix `K(w) / Tr K(w)`.
    pub a: SymMat<T>,
    /// Free-term factor.
    pub kappa: T,
    /// Lattice frame the control is diagonal in, if any.
    pub frame_id: Option<usize>,
    /// Eigenvalues of `a` along the frame directions; empty without a frame.
    pub frame_weights: Vec<T>,
}

/// `m / (d - m + 1) * P_m^(1 - 1/m) / P_{m-1}` of a cone spectrum.
pub fn kappa_of_spectrum<T: Real>(lambda: &[T], m: usize) -> T {
    let d = lambda.len();
    let p = elem_sym_all(lambda);
    let pm = p[m];
    let pm1 = p[m - 1];
    let ratio = T::count(m) / T::count(d - m + 1);
    // P_m^(1 - 1/m) = P_m / P_m^(1/m)
    ratio * (pm / root_m(pm, m)) / pm1
}

fn check_in_cone<T: Real>(lambda: &[T], m: usize) -> Result<()> {
    if m < 2 || m > lambda.len() {
        return Err(Error::Argument(format!("order m = {m} must lie in 2..={}", lambda.len())));
    }
    if !classify_spectrum(lambda, m)?.inside || !spectrum_in_cone(lambda, m) {
        return Err(Error::Domain(format!("matrix is not in the cone C_{m}")));
    }
    Ok(())
}

fn coeff_from_eigen<T: Real>(e: &Eigen<T>, m: usize) -> SymMat<T> {
    let grad = spectral_gradient(e.spectrum.values(), m);
    let total: T = grad.iter().copied().sum();
    let weights: Vec<T> = grad.iter().map(|&g| g / total).collect();
    e.recompose(&weights)
}

/// `a(w) = K(w) / Tr K(w)`: positive definite with unit trace on `C_m`.
pub fn normalized_coeff<T: Real>(w: &SymMat<T>, m: usize) -> Result<SymMat<T>> {
    let e = eigen(w)?;
    check_in_cone(e.spectrum.values(), m)?;
    Ok(coeff_from_eigen(&e, m))
}

/// `kappa(w)` for a cone matrix.
pub fn kappa<T: Real>(w: &SymMat<T>, m: usize) -> Result<T> {
    let e = eigen(w)?;
    check_in_cone(e.spectrum.values(), m)?;
    Ok(kappa_of_spectrum(e.spectrum.values(), m))
}

/// `g^(1 - 1/m)` with the `g = 0` branch exact.
pub fn rhs_power<T: Real>(g: T, m: usize) -> T {
    // g^(1 - 1/m) = (g^(m-1))^(1/m)
    if g == T::zero() {
        T::zero()
    } else {
        ((T::count(m - 1) / T::count(m)) * g.ln()).exp()
    }
}

/// Free term `f(w) = -kappa(w) g^(1 - 1/m)`.
pub fn free_term<T: Real>(w: &SymMat<T>, m: usize, g_val: T) -> Result<T> {
    if g_val < T::zero() || !g_val.is_finite() {
        return Err(Error::Domain(format!("right-hand side must be nonnegative, got {g_val}")));
    }
    Ok(-kappa(w, m)? * rhs_power(g_val, m))
}

impl<T: Real> Control<T> {
    /// Control for an arbitrary cone matrix; `w` is rescaled to unit trace.
    pub fn new(w: &SymMat<T>, m: usize) -> Result<Self> {
        let e = eigen(w)?;
        check_in_cone(e.spectrum.values(), m)?;
        let trace = w.trace();
        let a = coeff_from_eigen(&e, m);
        Ok(Self {
            w: w.scaled(T::one() / trace),
            a,
            kappa: kappa_of_spectrum(e.spectrum.values(), m),
            frame_id: None,
            frame_weights: Vec::new(),
        })
    }

    /// Control diagonal in a lattice frame: `w = Q diag(profile) Q^T`.
    pub fn in_frame(frame: &Frame<T>, frame_id: usize, profile: &[T], m: usize) -> Result<Self> {
        check_in_cone(profile, m)?;
        let grad = spectral_gradient(profile, m);
        let total: T = grad.iter().copied().sum();
        let weights: Vec<T> = grad.iter().map(|&g| g / total).collect();
        let trace: T = profile.iter().copied().sum();
        let normalized: Vec<T> = profile.iter().map(|&x| x / trace).collect();
        let w = recompose_in_order(&frame.q, &normalized);
        let a = recompose_in_order(&frame.q, &weights);
        Ok(Self { w, a, kappa: kappa_of_spectrum(profile, m), frame_id: Some(frame_id), frame_weights: weights })
    }

    /// `Tr(a v) - kappa c^(1/m)`.
    pub fn value(&self, v: &SymMat<T>, c_root: T) -> T {
        self.a.dot(v) - self.kappa * c_root
    }
}

fn recompose_in_order<T: Real>(q: &crate::symfun::Square<T>, weights: &[T]) -> SymMat<T> {
    let d = q.dim();
    SymMat::from_fn(d, |i, j| (0..d).map(|k| q.get(i, k) * weights[k] * q.get(j, k)).sum())
}

/// Control aligned with `v`, i.e. built from `v / Tr v`.
pub fn aligned_control<T: Real>(v: &SymMat<T>, m: usize) -> Result<Control<T>> {
    Control::new(v, m)
}

/// `min_{w in net} [Tr(a(w) v) - kappa(w) c^(1/m)]` and the minimizing index.
///
/// Ties go to the lowest index.
pub fn bellman_residual_argmin<T: Real>(v: &SymMat<T>, c: T, net: &ControlNet<T>) -> Result<(T, usize)> {
    if net.controls().is_empty() {
        return Err(Error::Argument("control net is empty".into()));
    }
    if v.dim() != net.dim() {
        return Err(Error::Argument("matrix dimension does not match the control net".into()));
    }
    if c < T::zero() || !c.is_finite() {
        return Err(Error::Domain(format!("level c must be nonnegative, got {c}")));
    }
    let c_root = root_m(c, net.order());
    let mut best = (T::infinity(), 0);
    for (i, control) in net.controls().iter().enumerate() {
        let value = control.value(v, c_root);
        if value < best.0 {
            best = (value, i);
        }
    }
    Ok(best)
}

pub fn bellman_residual<T: Real>(v: &SymMat<T>, c: T, net: &ControlNet<T>) -> Result<T> {
    Ok(bellman_residual_argmin(v, c, net)?.0)
}

/// `min_{w in net} (1/m) P_m^(1/m - 1)(w) Tr(K(w) v)`, the net's upper
/// envelope of the concave function `P_m^(1/m)` at `v`.
///
/// With the stored normalization this is `min Tr(a(w) v) / kappa(w)`.
pub fn concave_envelope_check<T: Real>(v: &SymMat<T>, m: usize, net: &ControlNet<T>) -> Result<T> {
    if net.controls().is_empty() {
        return Err(Error::Argument("control net is empty".into()));
    }
    if m != net.order() || v.dim() != net.dim() {
        return Err(Error::Argument("matrix or order does not match the control net".into()));
    }
    let e = eigen(v)?;
    check_in_cone(e.spectrum.values(), m)?;
    Ok(net
        .controls()
        .iter()
        .map(|c| c.a.dot(v) / c.kappa)
        .fold(T::infinity(), |acc, x| acc.min(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfun::pm_matrix;

    #[test]
    fn coeff_examples() {
        for d in 2..=5 {
            for m in 2..=d {
                let a = normalized_coeff(&SymMat::<f64>::identity(d), m).unwrap();
                for i in 0..d {
                    assert!((a.get(i, i) - 1.0 / d as f64).abs() < 1e-14);
                }
            }
        }
        let a = normalized_coeff(&SymMat::<f64>::from_diag(&[1.0, 2.0]), 2).unwrap();
        assert!((a.get(0, 0) - 2.0 / 3.0).abs() < 1e-14 && (a.get(1, 1) - 1.0 / 3.0).abs() < 1e-14);
        let w = SymMat::<f64>::from_diag(&[0.4, 1.3, 2.2]);
        let (a, b) = (normalized_coeff(&w, 2).unwrap(), normalized_coeff(&w.scaled(5.0), 2).unwrap());
        for (x, y) in a.entries().iter().zip(b.entries()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(matches!(
            normalized_coeff(&SymMat::<f64>::identity(2).scaled(-1.0), 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn free_term_examples() {
        let w = SymMat::<f64>::from_diag(&[0.3, 2.0, 1.0]);
        assert_eq!(free_term(&w, 2, 0.0).unwrap(), 0.0);
        assert!((free_term(&SymMat::<f64>::identity(2), 2, 1.0).unwrap() + 1.0).abs() < 1e-14);
        let f = free_term(&SymMat::<f64>::identity(3), 2, 1.0).unwrap();
        assert!((f + 3f64.sqrt() / 3.0).abs() < 1e-14);
        assert!(matches!(free_term(&w, 2, -1.0), Err(Error::Domain(_))));
        let a = free_term(&w, 3, 2.0).unwrap();
        let b = free_term(&w.scaled(7.0), 3, 2.0).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn residual_examples() {
        let net = build_control_net::<f64>(2, 2, 1, 1, 0).unwrap();
        let r = bellman_residual(&SymMat::identity(2), 1.0, &net).unwrap();
        assert!(r.abs() < 1e-14);
        let r = bellman_residual(&SymMat::identity(2).scaled(2.0), 4.0, &net).unwrap();
        assert!(r.abs() < 1e-14);
        let r = bellman_residual(&SymMat::identity(2), 4.0, &net).unwrap();
        assert!(r <= -1.0 + 1e-14);
        assert!(matches!(bellman_residual(&SymMat::identity(2), -1.0, &net), Err(Error::Domain(_))));
    }

    #[test]
    fn envelope_examples() {
        let net = build_control_net::<f64>(3, 2, 1, 1, 0).unwrap();
        let e = concave_envelope_check(&SymMat::identity(3), 2, &net).unwrap();
        assert!((e - 3f64.sqrt()).abs() < 1e-13);

        let v = SymMat::<f64>::from_diag(&[1.0, 2.0]);
        let net = build_control_net::<f64>(2, 2, 1, 1, 0).unwrap().with_control(aligned_control(&v, 2).unwrap());
        let e = concave_envelope_check(&v, 2, &net).unwrap();
        assert!((e - 2f64.sqrt()).abs() < 1e-13);

        let coarse = build_control_net::<f64>(2, 2, 1, 1, 0).unwrap();
        let v = SymMat::<f64>::from_diag(&[1.0, 4.0]);
        let e = concave_envelope_check(&v, 2, &coarse).unwrap();
        assert!((e - 2.5).abs() < 1e-13);
        assert!(e >= pm_matrix(&v, 2).unwrap().sqrt());
    }
}
