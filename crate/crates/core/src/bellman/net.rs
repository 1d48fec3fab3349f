use rand::Rng;

use super::Control;
use crate::cone::spectrum_in_cone;
use crate::error::{Error, Result};
use crate::sampling::rng_from_seed;
use crate::scalar::{binomial, Real};
use crate::symfun::{elem_sym_all, Square};

/// Minimum of `P_k(rho) / P_k(1/d, ..., 1/d)` over `k <= m` accepted for a
/// net profile. Bounds the anisotropy of every control.
pub const PROFILE_MARGIN: f64 = 1e-3;

const MAX_REJECTIONS: usize = 1_000_000;

/// Orthogonal frame of integer lattice directions.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T> {
    /// Lattice vectors, one per column of `q`.
    pub directions: Vec<Vec<i32>>,
    /// Unit columns `directions[k] / |directions[k]|`.
    pub q: Square<T>,
}

impl<T: Real> Frame<T> {
    fn from_directions(directions: Vec<Vec<i32>>) -> Self {
        let columns: Vec<Vec<T>> = directions
            .iter()
            .map(|dir| {
                let n = (dir.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt();
                dir.iter().map(|&x| T::lit(x as f64 / n)).collect()
            })
            .collect();
        Self { q: Square::from_columns(&columns), directions }
    }

    /// `|e_k|^2` of each lattice direction.
    pub fn squared_lengths(&self) -> Vec<i32> {
        self.directions.iter().map(|dir| dir.iter().map(|&x| x * x).sum()).collect()
    }
}

fn gcd(a: i32, b: i32) -> i32 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Planar frames `{(p, q), (-q, p)}` for primitive `(p, q)` with `p > 0, q >= 0`,
/// ordered by stencil radius then angle.
fn planar_frames(count: usize) -> Vec<Vec<Vec<i32>>> {
    let mut bound = 2;
    loop {
        let mut gens: Vec<(i32, i32)> = Vec::new();
        for p in 1..=bound {
            for q in 0..=bound {
                if gcd(p, q) == 1 {
                    gens.push((p, q));
                }
            }
        }
        gens.sort_by(|a, b| {
            let ra = a.0 * a.0 + a.1 * a.1;
            let rb = b.0 * b.0 + b.1 * b.1;
            ra.cmp(&rb).then_with(|| {
                let ta = (a.1 as f64).atan2(a.0 as f64);
                let tb = (b.1 as f64).atan2(b.0 as f64);
                ta.partial_cmp(&tb).expect("finite angles")
            })
        });
        // Every generator with radius <= bound is present, so the prefix is final.
        let complete: Vec<(i32, i32)> =
            gens.into_iter().filter(|g| g.0 * g.0 + g.1 * g.1 <= bound * bound).collect();
        if complete.len() >= count {
            return complete
                .into_iter()
                .take(count)
                .map(|(p, q)| vec![vec![p, q], vec![-q, p]])
                .collect();
        }
        bound *= 2;
    }
}

fn axis(d: usize, i: usize) -> Vec<i32> {
    let mut v = vec![0; d];
    v[i] = 1;
    v
}

/// Axis frame, then one 45-degree rotation per coordinate plane, then (for
/// `d = 3`) the four body-diagonal frames.
fn spatial_frames(d: usize) -> Vec<Vec<Vec<i32>>> {
    let mut frames = vec![(0..d).map(|i| axis(d, i)).collect::<Vec<_>>()];
    for i in 0..d {
        for j in (i + 1)..d {
            let mut frame: Vec<Vec<i32>> = (0..d).map(|k| axis(d, k)).collect();
            let mut plus = vec![0; d];
            plus[i] = 1;
            plus[j] = 1;
            let mut minus = vec![0; d];
            minus[i] = -1;
            minus[j] = 1;
            frame[i] = plus;
            frame[j] = minus;
            frames.push(frame);
        }
    }
    if d == 3 {
        for (a, b, c) in [(1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1)] {
            let u = vec![a, b, c];
            let v = vec![b, -a, 0];
            let w = vec![u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
            frames.push(vec![u, v, w]);
        }
    }
    frames
}

/// The first `count` lattice frames for dimension `d`.
///
/// `d = 2` supports any count; higher dimensions offer the axis frame, the
/// coordinate-plane diagonals and, for `d = 3`, the body diagonals.
pub fn lattice_frames<T: Real>(d: usize, count: usize) -> Result<Vec<Frame<T>>> {
    if d < 2 {
        return Err(Error::Argument("lattice frames need d >= 2".into()));
    }
    if count == 0 {
        return Err(Error::Argument("frame count must be at least 1".into()));
    }
    let raw = if d == 2 { planar_frames(count) } else { spatial_frames(d) };
    if raw.len() < count {
        return Err(Error::Argument(format!(
            "d = {d} offers {} lattice frames, {count} requested",
            raw.len()
        )));
    }
    Ok(raw.into_iter().take(count).map(Frame::from_directions).collect())
}

fn relative_margin(rho: &[f64], m: usize) -> f64 {
    let d = rho.len();
    let p = elem_sym_all(rho);
    (1..=m)
        .map(|k| p[k] / (binomial::<f64>(d, k) / (d as f64).powi(k as i32)))
        .fold(f64::INFINITY, f64::min)
}

/// Point on the segment from the isotropic profile to `e_k` where the
/// relative margin drops to [`PROFILE_MARGIN`].
fn near_boundary_profile(d: usize, m: usize, k: usize) -> Vec<f64> {
    let iso = 1.0 / d as f64;
    let at = |s: f64| -> Vec<f64> {
        (0..d).map(|i| (1.0 - s) * iso + if i == k { s } else { 0.0 }).collect()
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if relative_margin(&at(mid), m) >= PROFILE_MARGIN {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}

/// Unit-trace eigenvalue profiles for a control net.
///
/// Entry 0 is isotropic. Then come the near-boundary anchors (one per
/// coordinate, margin [`PROFILE_MARGIN`]) and rejection-sampled profiles,
/// each sampled profile followed by its cyclic shifts so that frames need
/// only cover orientations up to coordinate permutation.
pub fn eigen_profiles<T: Real>(d: usize, m: usize, count: usize, seed: u64) -> Result<Vec<Vec<T>>> {
    if count == 0 {
        return Err(Error::Argument("profile count must be at least 1".into()));
    }
    if m < 2 || m > d {
        return Err(Error::Argument(format!("order m = {m} must lie in 2..={d}")));
    }
    let mut out: Vec<Vec<f64>> = vec![vec![1.0 / d as f64; d]];
    for k in 0..d {
        if out.len() == count {
            break;
        }
        out.push(near_boundary_profile(d, m, k));
    }
    let mut rng = rng_from_seed(seed);
    let mut rejections = 0;
    while out.len() < count {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let trace: f64 = x.iter().sum();
        let accepted = trace > 0.0 && {
            let rho: Vec<f64> = x.iter().map(|v| v / trace).collect();
            spectrum_in_cone(&rho, m) && relative_margin(&rho, m) >= PROFILE_MARGIN
        };
        if !accepted {
            rejections += 1;
            if rejections > MAX_REJECTIONS {
                return Err(Error::Numeric("profile rejection sampling exhausted".into()));
            }
            continue;
        }
        let rho: Vec<f64> = x.iter().map(|v| v / trace).collect();
        for shift in 0..d {
            if out.len() == count {
                break;
            }
            out.push((0..d).map(|i| rho[(i + shift) % d]).collect());
        }
    }
    Ok(out.into_iter().map(|p| p.into_iter().map(T::lit).collect()).collect())
}

/// Finite family of cone controls standing in for the infimum over `C_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlNet<T> {
    d: usize,
    m: usize,
    controls: Vec<Control<T>>,
    frames: Vec<Frame<T>>,
    profile_count: usize,
}

impl<T: Real> ControlNet<T> {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn controls(&self) -> &[Control<T>] {
        &self.controls
    }

    pub fn frames(&self) -> &[Frame<T>] {
        &self.frames
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn profile_count(&self) -> usize {
        self.profile_count
    }

    pub fn len(&self) -> usize {
        self.controls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.controls.is_empty()
    }

    /// The isotropic control `w = I / d`, always stored first.
    pub fn isotropic(&self) -> &Control<T> {
        &self.controls[0]
    }

    /// Net with one more control appended.
    pub fn with_control(mut self, control: Control<T>) -> Self {
        self.controls.push(control);
        self
    }

    /// Whether every control carries a lattice frame, as the grid solver requires.
    pub fn is_lattice(&self) -> bool {
        self.controls.iter().all(|c| c.frame_id.is_some())
    }
}

/// Builds `{Q diag(rho) Q^T}` over the first `frames` lattice frames and the
/// non-isotropic profiles of [`eigen_profiles`], preceded by the isotropic
/// control. The net has `1 + frames * (profiles - 1)` controls.
pub fn build_control_net<T: Real>(
    d: usize,
    m: usize,
    frames: usize,
    profiles: usize,
    seed: u64,
) -> Result<ControlNet<T>> {
    let frame_list = lattice_frames::<T>(d, frames)?;
    let profile_list = eigen_profiles::<T>(d, m, profiles, seed)?;
    let mut controls = vec![Control::in_frame(&frame_list[0], 0, &profile_list[0], m)?];
    for (fid, frame) in frame_list.iter().enumerate() {
        for profile in &profile_list[1..] {
            controls.push(Control::in_frame(frame, fid, profile, m)?);
        }
    }
    Ok(ControlNet { d, m, controls, frames: frame_list, profile_count: profiles })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_frame_order() {
        let f = planar_frames(4);
        assert_eq!(f[0], vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(f[1], vec![vec![1, 1], vec![-1, 1]]);
        assert_eq!(f[2], vec![vec![2, 1], vec![-1, 2]]);
        assert_eq!(f[3], vec![vec![1, 2], vec![-2, 1]]);
    }

    #[test]
    fn frames_are_orthogonal() {
        for (d, count) in [(2, 12), (3, 8), (4, 7), (6, 16)] {
            for frame in lattice_frames::<f64>(d, count).unwrap() {
                assert!(frame.q.orthogonality_defect() < 1e-14, "{:?}", frame.directions);
            }
        }
        assert!(lattice_frames::<f64>(3, 9).is_err());
    }

    #[test]
    fn minimal_net() {
        let net = build_control_net::<f64>(2, 2, 1, 1, 0).unwrap();
        assert_eq!(net.len(), 1);
        let c = net.isotropic();
        assert!((c.a.get(0, 0) - 0.5).abs() < 1e-15 && c.a.get(0, 1).abs() < 1e-15);
        assert!((c.kappa - 1.0).abs() < 1e-14);
    }

    #[test]
    fn net_size_and_invariants() {
        let net = build_control_net::<f64>(2, 2, 4, 8, 5).unwrap();
        assert_eq!(net.len(), 1 + 4 * 7);
        for c in net.controls() {
            assert!((c.a.trace() - 1.0).abs() < 1e-12);
            assert!(c.kappa > 0.0);
            assert!(c.frame_weights.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn anchors_sit_on_margin() {
        let p = eigen_profiles::<f64>(3, 3, 4, 0).unwrap();
        for rho in &p[1..4] {
            assert!((relative_margin(rho, 3) - PROFILE_MARGIN).abs() < 1e-9);
        }
    }
}
