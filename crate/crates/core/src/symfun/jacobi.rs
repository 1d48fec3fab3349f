//! Cyclic Jacobi eigensolver for the small symmetric matrices used here.

use super::matrix::{Eigen, Spectrum, Square, SymMat};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sweep cap; `d <= 6` converges quadratically in a handful of sweeps.
pub const MAX_SWEEPS: usize = 64;

/// Relative off-diagonal tolerance in `f64` terms.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Stops once the off-diagonal Frobenius norm is below
/// `OFF_DIAGONAL_TOL * ||A||_F`. Eigenpairs come back sorted ascending.
pub fn eigen<T: Real>(w: &SymMat<T>) -> Result<Eigen<T>> {
    let d = w.dim();
    if d == 0 {
        return Err(Error::Argument("cannot decompose a 0 x 0 matrix".into()));
    }
    if w.entries().iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let mut a = w.to_square();
    let mut q = Square::identity(d);
    let norm = w.frobenius_norm();
    let threshold = T::tol(OFF_DIAGONAL_TOL) * norm;

    let off_norm = |a: &Square<T>| {
        let mut acc = T::zero();
        for i in 0..d {
            for j in 0..i {
                acc = acc + T::lit(2.0) * a.get(i, j) * a.get(i, j);
            }
        }
        acc.sqrt()
    };

    let mut converged = off_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..d {
            for r in (p + 1)..d {
                let apr = a.get(p, r);
                if apr == T::zero() {
                    continue;
                }
                let theta = (a.get(r, r) - a.get(p, p)) / (T::lit(2.0) * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // A <- J^T A J with J the (p, r) rotation.
                for k in 0..d {
                    let akp = a.get(k, p);
                    let akr = a.get(k, r);
                    a.set(k, p, c * akp - s * akr);
                    a.set(k, r, s * akp + c * akr);
                }
                for k in 0..d {
                    let apk = a.get(p, k);
                    let ark = a.get(r, k);
                    a.set(p, k, c * apk - s * ark);
                    a.set(r, k, s * apk + c * ark);
                }
                for k in 0..d {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, c * qkp - s * qkr);
                    q.set(k, r, s * qkp + c * qkr);
                }
            }
        }
        converged = off_norm(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).expect("finite eigenvalues"));
    let values: Vec<T> = order.iter().map(|&i| a.get(i, i)).collect();
    let columns: Vec<Vec<T>> = order.iter().map(|&i| q.column(i)).collect();
    Ok(Eigen { spectrum: Spectrum::new(values)?, vectors: Square::from_columns(&columns) })
}

/// Sorted eigenvalues only.
pub fn spectrum<T: Real>(w: &SymMat<T>) -> Result<Spectrum<T>> {
    Ok(eigen(w)?.spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_is_immediate() {
        let w = SymMat::<f64>::from_diag(&[3.0, -1.0, 2.0]);
        let e = eigen(&w).unwrap();
        assert_eq!(e.spectrum.values(), &[-1.0, 2.0, 3.0]);
    }

    #[test]
    fn reconstructs_dense_matrix() {
        let w = SymMat::from_fn(5, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + if i == j { 0.3 } else { 0.0 });
        let e = eigen(&w).unwrap();
        let back = e.recompose(e.spectrum.values());
        for (a, b) in back.entries().iter().zip(w.entries()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(e.vectors.orthogonality_defect() < 1e-13);
    }

    #[test]
    fn zero_matrix() {
        let e = eigen(&SymMat::<f64>::zeros(4)).unwrap();
        assert!(e.spectrum.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn repeated_eigenvalues() {
        let q = Square::rotation(3, 0, 2, 0.7f64);
        let w = SymMat::<f64>::from_diag(&[2.0, 2.0, -1.0]).conjugate(&q);
        let s = spectrum(&w).unwrap();
        let expect = [-1.0, 2.0, 2.0];
        for (a, b) in s.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn single_precision() {
        let w = SymMat::from_fn(3, |i, j| if i == j { 2.0f32 } else { 0.5 });
        let s = spectrum(&w).unwrap();
        assert!((s.values()[2] - 3.0).abs() < 1e-5);
        assert!((s.values()[0] - 1.5).abs() < 1e-5);
    }
}
