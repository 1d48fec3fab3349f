use crate::error::{Error, Result};
use crate::scalar::Real;

/// Computational domain inside the bounding box `[-1, 1]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Unit disc (`d = 2`) or ball, with level set `psi = (1 - |x|^2) / 2`.
    Ball,
    /// The box itself, with `psi = min_k (1 - x_k^2) / 2`.
    Cube,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Ball => "disc",
            Domain::Cube => "square",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "disc" | "ball" => Ok(Domain::Ball),
            "square" | "cube" => Ok(Domain::Cube),
            other => Err(Error::Config(format!("unknown domain `{other}` (expected disc | ball | square | cube)"))),
        }
    }

    /// Defining function: positive inside, zero on the boundary.
    pub fn psi<T: Real>(self, x: &[T]) -> T {
        let half = T::lit(0.5);
        match self {
            Domain::Ball => half * (T::one() - x.iter().map(|&v| v * v).sum::<T>()),
            Domain::Cube => x.iter().map(|&v| half * (T::one() - v * v)).fold(T::infinity(), T::min),
        }
    }

    /// Euclidean distance to the boundary for points inside; negative outside.
    pub fn distance<T: Real>(self, x: &[T]) -> T {
        match self {
            Domain::Ball => T::one() - x.iter().map(|&v| v * v).sum::<T>().sqrt(),
            Domain::Cube => x.iter().map(|&v| T::one() - v.abs()).fold(T::infinity(), T::min),
        }
    }

    /// Fraction `s` in `(0, 1]` at which `x + s step` leaves the domain,
    /// or `1` if the whole step stays inside.
    pub fn crossing<T: Real>(self, x: &[T], step: &[T]) -> T {
        let s = match self {
            Domain::Ball => {
                let a: T = step.iter().map(|&v| v * v).sum();
                let b: T = T::lit(2.0) * x.iter().zip(step).map(|(&p, &v)| p * v).sum::<T>();
                let c: T = x.iter().map(|&v| v * v).sum::<T>() - T::one();
                let disc = (b * b - T::lit(4.0) * a * c).max(T::zero());
                // c < 0 inside, so this root is the positive one; the
                // rationalized form avoids cancellation when b > 0.
                if b > T::zero() {
                    (T::lit(-2.0) * c) / (b + disc.sqrt())
                } else {
                    (-b + disc.sqrt()) / (T::lit(2.0) * a)
                }
            }
            Domain::Cube => {
                let mut s = T::infinity();
                for (&p, &v) in x.iter().zip(step) {
                    if v > T::zero() {
                        s = s.min((T::one() - p) / v);
                    } else if v < T::zero() {
                        s = s.min((-T::one() - p) / v);
                    }
                }
                s
            }
        };
        s.min(T::one()).max(T::zero())
    }
}

/// Uniform lattice on `[-1, 1]^d` with `n` intervals per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    d: usize,
    n: usize,
    h: T,
}

impl<T: Real> Grid<T> {
    pub fn new(d: usize, n: usize) -> Self {
        Self { d, n, h: T::lit(2.0) / T::count(n) }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn intervals(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> T {
        self.h
    }

    pub fn node_count(&self) -> usize {
        (self.n + 1).pow(self.d as u32)
    }

    /// Multi-index of a node; the last axis varies fastest.
    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for k in (0..self.d).rev() {
            out[k] = idx % (self.n + 1);
            idx /= self.n + 1;
        }
        out
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &i| acc * (self.n + 1) + i)
    }

    pub fn coords(&self, idx: usize) -> Vec<T> {
        self.multi_index(idx).into_iter().map(|i| -T::one() + T::count(i) * self.h).collect()
    }

    /// Node reached by the integer offset `dir`, if it stays in the box.
    pub fn offset(&self, idx: usize, dir: &[i32]) -> Option<usize> {
        let mut multi = self.multi_index(idx);
        for (m, &e) in multi.iter_mut().zip(dir) {
            let next = *m as i64 + e as i64;
            if next < 0 || next > self.n as i64 {
                return None;
            }
            *m = next as usize;
        }
        Some(self.linear_index(&multi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let g = Grid::<f64>::new(3, 4);
        assert_eq!(g.node_count(), 125);
        for idx in [0, 17, 124] {
            assert_eq!(g.linear_index(&g.multi_index(idx)), idx);
        }
        assert_eq!(g.coords(124), vec![1.0, 1.0, 1.0]);
        assert_eq!(g.offset(0, &[-1, 0, 0]), None);
        assert_eq!(g.offset(0, &[0, 0, 1]), Some(1));
    }

    #[test]
    fn ball_crossing() {
        let s = Domain::Ball.crossing(&[0.5f64, 0.0], &[1.0, 0.0]);
        assert!((s - 0.5).abs() < 1e-15);
        let s = Domain::Ball.crossing(&[0.0, 0.9], &[0.0, -0.5]);
        assert_eq!(s, 1.0);
        let s = Domain::Ball.crossing(&[-0.6f64, 0.0], &[-1.0, 0.0]);
        assert!((s - 0.4).abs() < 1e-15);
    }

    #[test]
    fn cube_crossing_and_psi() {
        let s = Domain::Cube.crossing(&[0.5f64, 0.9], &[0.25, 0.25]);
        assert!((s - 0.4).abs() < 1e-15);
        assert_eq!(Domain::Cube.psi(&[0.0, 1.0]), 0.0);
        assert!((Domain::Ball.psi(&[0.0, 0.0]) - 0.5f64).abs() < 1e-15);
        assert!((Domain::Cube.distance(&[0.2, -0.7]) - 0.3f64).abs() < 1e-15);
    }
}
