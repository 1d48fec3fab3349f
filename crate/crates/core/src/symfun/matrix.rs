use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense symmetric `d x d` matrix in packed lower-triangular storage.
///
/// Entry `(i, j)` with `i >= j` lives at `i * (i + 1) / 2 + j`, so symmetry
/// holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat<T> {
    dim: usize,
    entries: Vec<T>,
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl<T: Real> SymMat<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![T::zero(); dim * (dim + 1) / 2] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![T::one(); dim])
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut out = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            out.set(i, i, x);
        }
        out
    }

    /// Builds a matrix from `f(i, j)` evaluated on the lower triangle.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in 0..=i {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Wraps packed lower-triangular entries.
    pub fn from_packed(dim: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != dim * (dim + 1) / 2 {
            return Err(Error::Argument(format!(
                "packed storage for d = {dim} needs {} entries, got {}",
                dim * (dim + 1) / 2,
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument("matrix entries must be finite".into()));
        }
        Ok(Self { dim, entries })
    }

    /// Reads a full row-major matrix, rejecting asymmetric input.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Argument("matrix rows must form a square".into()));
        }
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (rows[i][j], rows[j][i]);
                let scale = T::one() + a.abs() + b.abs();
                if (a - b).abs() > T::tol(1e-12) * scale {
                    return Err(Error::Argument(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Self::from_packed(dim, Self::from_fn(dim, |i, j| rows[i][j]).entries)
    }

    /// The rank-one matrix `eta eta^T`.
    pub fn outer(eta: &[T]) -> Self {
        Self::from_fn(eta.len(), |i, j| eta[i] * eta[j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[packed_index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[packed_index(i, j)] = value;
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + b).collect();
        Self { dim: self.dim, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-T::one()))
    }

    /// `self + t I`.
    pub fn shifted(&self, t: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.set(i, i, out.get(i, i) + t);
        }
        out
    }

    /// Frobenius inner product, i.e. `Tr(self * other)` for symmetric arguments.
    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut acc = T::zero();
        for i in 0..self.dim {
            acc = acc + self.get(i, i) * other.get(i, i);
            for j in 0..i {
                acc = acc + T::lit(2.0) * self.get(i, j) * other.get(i, j);
            }
        }
        acc
    }

    /// `eta^T self eta`.
    pub fn quad_form(&self, eta: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + eta[i] * self.get(i, j) * eta[j];
            }
        }
        acc
    }

    /// `q self q^T`.
    pub fn conjugate(&self, q: &Square<T>) -> Self {
        let d = self.dim;
        let a = self.to_square();
        let qa = q.mul(&a);
        let qt = q.transpose();
        let out = qa.mul(&qt);
        Self::from_fn(d, |i, j| T::lit(0.5) * (out.get(i, j) + out.get(j, i)))
    }

    /// Principal submatrix with row and column `k` deleted.
    pub fn principal_minor(&self, k: usize) -> Self {
        let keep: Vec<usize> = (0..self.dim).filter(|&i| i != k).collect();
        Self::from_fn(keep.len(), |i, j| self.get(keep[i], keep[j]))
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn to_square(&self) -> Square<T> {
        let mut out = Square::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }
}

/// Dense square matrix in row-major order, used for eigenvector frames and
/// orthogonal transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct Square<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> Square<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![T::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.set(i, i, T::one());
        }
        out
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<T>]) -> Self {
        let dim = columns.len();
        let mut out = Self::zeros(dim);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length mismatch");
            for (i, &x) in col.iter().enumerate() {
                out.set(i, j, x);
            }
        }
        out
    }

    /// Givens rotation by `theta` in the `(p, q)` coordinate plane.
    pub fn rotation(dim: usize, p: usize, q: usize, theta: T) -> Self {
        let mut out = Self::identity(dim);
        let (s, c) = theta.sin_cos();
        out.set(p, p, c);
        out.set(q, q, c);
        out.set(p, q, -s);
        out.set(q, p, s);
        out
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.dim + j] = value;
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] = out.data[i * d + j] + a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `max |Q^T Q - I|`, zero for an exactly orthogonal matrix.
    pub fn orthogonality_defect(&self) -> T {
        let qtq = self.transpose().mul(self);
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((qtq.get(i, j) - target).abs());
            }
        }
        worst
    }
}

/// Eigenvalues of a symmetric matrix, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    values: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    /// Sorts `values` ascending; rejects empty or non-finite input.
    pub fn new(mut values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("spectrum must be nonempty".into()));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument("spectrum values must be finite".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `P_k` of the eigenvalues.
    pub fn elem_sym(&self, k: usize) -> Result<T> {
        super::elem_sym(&self.values, k)
    }

    /// Spectrum of `w + t I`.
    pub fn shifted(&self, t: T) -> Self {
        Self { values: self.values.iter().map(|&x| x + t).collect() }
    }
}

/// Spectral decomposition `A = Q diag(values) Q^T`.
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub spectrum: Spectrum<T>,
    /// Columns are unit eigenvectors, ordered like `spectrum`.
    pub vectors: Square<T>,
}

impl<T: Real> Eigen<T> {
    /// Rebuilds `Q diag(f) Q^T` for per-eigenvalue weights `f`.
    pub fn recompose(&self, weights: &[T]) -> SymMat<T> {
        let q = &self.vectors;
        let d = q.dim();
        SymMat::from_fn(d, |i, j| (0..d).map(|k| q.get(i, k) * weights[k] * q.get(j, k)).sum())
    }
}
