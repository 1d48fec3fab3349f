//! Seeded random draws shared by the property checkers and the control net.
//!
//! Cone members come from rejection-free shifting: draw a symmetric matrix
//! with entries uniform in `[-1, 1]`, then add `(t0 + eps) I` where `t0` is
//! its cone root and `eps` is log-uniform in `[1e-3, 1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::root_along_identity;
use crate::error::Result;
use crate::scalar::Real;
use crate::symfun::{spectrum, Square, SymMat};

/// Deterministic generator used everywhere a seed is accepted.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Symmetric matrix with entries uniform in `[-1, 1]`.
pub fn symmetric<T: Real, R: Rng>(rng: &mut R, d: usize) -> SymMat<T> {
    SymMat::from_fn(d, |_, _| T::lit(rng.gen_range(-1.0..=1.0)))
}

/// Random member of `C_m` with a strictly positive cone margin.
pub fn cone_member<T: Real, R: Rng>(rng: &mut R, d: usize, m: usize) -> Result<SymMat<T>> {
    let w = symmetric::<T, R>(rng, d);
    let t0 = root_along_identity(spectrum(&w)?.values(), m)?;
    let eps = T::lit(log_uniform(rng, 1e-3, 1.0));
    Ok(w.shifted(t0 + eps))
}

/// Random orthogonal matrix: a product of Givens rotations over every
/// coordinate plane, with a random reflection half of the time.
pub fn orthogonal<T: Real, R: Rng>(rng: &mut R, d: usize) -> Square<T> {
    let mut q = Square::identity(d);
    for p in 0..d {
        for r in (p + 1)..d {
            let theta = T::lit(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
            q = q.mul(&Square::rotation(d, p, r, theta));
        }
    }
    if rng.gen_bool(0.5) {
        for i in 0..d {
            q.set(i, 0, -q.get(i, 0));
        }
    }
    q
}

/// Nonnegative weights, log-uniform in `[1e-3, 10]`.
pub fn weights<T: Real, R: Rng>(rng: &mut R, len: usize) -> Vec<T> {
    (0..len).map(|_| T::lit(log_uniform(rng, 1e-3, 10.0))).collect()
}

/// Random unit vector.
pub fn unit_vector<T: Real, R: Rng>(rng: &mut R, d: usize) -> Vec<T> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| T::lit(x / n)).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::in_cone;

    #[test]
    fn cone_members_are_inside() {
        let mut rng = rng_from_seed(7);
        for d in 2..=6 {
            for m in 1..=d {
                for _ in 0..50 {
                    let w: SymMat<f64> = cone_member(&mut rng, d, m).unwrap();
                    assert!(in_cone(&w, m).unwrap().inside);
                }
            }
        }
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = rng_from_seed(3);
        for d in 2..=6 {
            let q: Square<f64> = orthogonal(&mut rng, d);
            assert!(q.orthogonality_defect() < 1e-13);
        }
    }

    #[test]
    fn seeded_draws_repeat() {
        let a: SymMat<f64> = cone_member(&mut rng_from_seed(11), 4, 3).unwrap();
        let b: SymMat<f64> = cone_member(&mut rng_from_seed(11), 4, 3).unwrap();
        assert_eq!(a, b);
    }
}
