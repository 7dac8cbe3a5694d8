//! Self-contained dense linear algebra: vectors, column-major matrices,
//! rank-one accumulation, orthogonalization, linear solves, QR, and a small
//! dense SVD for verification-scale factors.
//!
//! The layer is deliberately minimal — exactly the kernels the rank-one
//! update machinery needs, written so that every floating-point operation
//! is attributable (see [`crate::bench`]). Storage is column-major so the
//! rank-one update and the matrix-vector products stream contiguously over
//! columns.

pub mod orth;
pub mod qr;
pub mod solve;
pub mod svd;

pub use orth::orthogonal_residual;
pub use qr::householder_qr;
pub use solve::solve_transposed;
pub use svd::{small_svd, SvdResult};

use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

// ─── Vector ──────────────────────────────────────────────────────────────

/// A dense column vector with at least one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<S: Scalar = f64> {
    data: Vec<S>,
}

impl<S: Scalar> Vector<S> {
    /// Wraps entry data, rejecting empty or non-finite input.
    pub fn from_vec(data: Vec<S>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "Vector::from_vec",
                expected: "at least one entry".into(),
                got: "0 entries".into(),
            });
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig {
                message: format!("vector entry {bad} is not finite"),
            });
        }
        Ok(Self { data })
    }

    /// An all-zero vector of length `len`.
    ///
    /// # Panics
    /// Panics when `len == 0`.
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "vector length must be positive");
        Self {
            data: vec![S::zero(); len],
        }
    }

    /// Builds a vector entrywise from a closure.
    ///
    /// The closure is trusted to produce finite values.
    ///
    /// # Panics
    /// Panics when `len == 0`.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> S) -> Self {
        assert!(len > 0, "vector length must be positive");
        Self {
            data: (0..len).map(|i| f(i)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Always false: the empty vector cannot be constructed.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.data.iter()
    }

    /// True when every entry is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == S::zero())
    }

    /// Inner product with `rhs`.
    pub fn dot(&self, rhs: &Self) -> Result<S> {
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                context: "Vector::dot",
                expected: format!("length {}", self.len()),
                got: format!("length {}", rhs.len()),
            });
        }
        Ok(dot_slices(&self.data, &rhs.data))
    }

    /// Euclidean norm.
    pub fn norm(&self) -> S {
        dot_slices(&self.data, &self.data).sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .fold(S::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Returns `factor * self` as a new vector.
    pub fn scaled(&self, factor: S) -> Self {
        Self {
            data: self.data.iter().map(|v| *v * factor).collect(),
        }
    }

    /// In-place `self += factor * rhs`; lengths must already agree.
    pub(crate) fn add_scaled_in_place(&mut self, factor: S, rhs: &Self) {
        debug_assert_eq!(self.len(), rhs.len());
        for (s, r) in self.data.iter_mut().zip(rhs.data.iter()) {
            *s = s.mac(factor, *r);
        }
    }

    /// Entrywise difference.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                context: "Vector::sub",
                expected: format!("length {}", self.len()),
                got: format!("length {}", rhs.len()),
            });
        }
        Ok(Self {
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| *a - *b)
                .collect(),
        })
    }

    /// Converts entrywise through `f64` into another scalar type.
    pub fn convert<T: Scalar>(&self) -> Vector<T> {
        Vector {
            data: self
                .data
                .iter()
                .map(|v| T::from_f64_lossy(v.to_f64_lossy()))
                .collect(),
        }
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [S] {
        &mut self.data
    }
}

impl<S: Scalar> Index<usize> for Vector<S> {
    type Output = S;

    fn index(&self, i: usize) -> &S {
        &self.data[i]
    }
}

/// Inner product of two equally long slices, as `len` multiply-accumulates.
#[inline]
pub(crate) fn dot_slices<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        acc = acc.mac(*x, *y);
    }
    acc
}

// ─── Matrix ──────────────────────────────────────────────────────────────

/// A dense matrix with positive dimensions, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S: Scalar = f64> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    /// Wraps column-major entry data, rejecting inconsistent sizes and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "Matrix::from_vec",
                expected: format!("{rows}x{cols} with {} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig {
                message: format!(
                    "matrix entry ({}, {}) is not finite",
                    bad % rows,
                    bad / rows
                ),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds from row-major data — convenient for literal matrices whose
    /// source text reads in row order.
    pub fn from_rows(rows: usize, cols: usize, data: &[S]) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "Matrix::from_rows",
                expected: format!("{rows}x{cols} with {} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        let m = Self::from_fn(rows, cols, |i, j| data[i * cols + j]);
        if let Some(bad) = m.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig {
                message: format!(
                    "matrix entry ({}, {}) is not finite",
                    bad % rows,
                    bad / rows
                ),
            });
        }
        Ok(m)
    }

    /// An all-zero matrix.
    ///
    /// # Panics
    /// Panics when either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    /// Builds a matrix entrywise from a closure called as `f(row, col)`.
    ///
    /// The closure is trusted to produce finite values.
    ///
    /// # Panics
    /// Panics when either dimension is zero.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// The n-by-n identity.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at `(i, j)`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> S {
        self.data[i + j * self.rows]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i + j * self.rows] = v;
    }

    /// Column `j` as a contiguous slice.
    #[inline]
    pub fn col(&self, j: usize) -> &[S] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub(crate) fn col_mut(&mut self, j: usize) -> &mut [S] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    /// Column `j` copied into a [`Vector`].
    pub fn col_vector(&self, j: usize) -> Vector<S> {
        Vector {
            data: self.col(j).to_vec(),
        }
    }

    /// The full column-major entry slice.
    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    /// The transposed matrix as a new allocation.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    /// Matrix-vector product `self * x`, computed column by column so the
    /// cost is exactly rows·cols multiply-accumulates.
    pub fn matvec(&self, x: &Vector<S>) -> Result<Vector<S>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "Matrix::matvec",
                expected: format!("vector of length {}", self.cols),
                got: format!("length {}", x.len()),
            });
        }
        let mut y = vec![S::zero(); self.rows];
        for j in 0..self.cols {
            let xj = x.data[j];
            for (yi, aij) in y.iter_mut().zip(self.col(j).iter()) {
                *yi = yi.mac(*aij, xj);
            }
        }
        Ok(Vector { data: y })
    }

    /// Transposed product `selfᵀ * x` (one inner product per column).
    pub fn matvec_transposed(&self, x: &Vector<S>) -> Result<Vector<S>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "Matrix::matvec_transposed",
                expected: format!("vector of length {}", self.rows),
                got: format!("length {}", x.len()),
            });
        }
        let data = (0..self.cols)
            .map(|j| dot_slices(self.col(j), &x.data))
            .collect();
        Ok(Vector { data })
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Matrix<S>) -> Result<Matrix<S>> {
        if rhs.rows != self.cols {
            return Err(Error::DimensionMismatch {
                context: "Matrix::matmul",
                expected: format!("{} rows on the right factor", self.cols),
                got: format!("{} rows", rhs.rows),
            });
        }
        let mut out = Matrix::<S>::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let rcol = rhs.col(j);
            let ocol: &mut [S] = out.col_mut(j);
            for (k, rkj) in rcol.iter().enumerate() {
                let acol = self.col(k);
                for (o, aik) in ocol.iter_mut().zip(acol.iter()) {
                    *o = o.mac(*aik, *rkj);
                }
            }
        }
        Ok(out)
    }

    /// In-place `self += scale * x * yᵀ`; shapes must already agree.
    pub(crate) fn accumulate_outer(&mut self, x: &Vector<S>, y: &Vector<S>, scale: S) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        for j in 0..self.cols {
            let syj = scale * y.data[j];
            for (aij, xi) in self.col_mut(j).iter_mut().zip(x.data.iter()) {
                *aij = aij.mac(*xi, syj);
            }
        }
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &Matrix<S>) -> Result<Matrix<S>> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                context: "Matrix::add",
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", rhs.rows, rhs.cols),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| *a + *b)
                .collect(),
        })
    }

    /// Entrywise difference.
    pub fn sub(&self, rhs: &Matrix<S>) -> Result<Matrix<S>> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                context: "Matrix::sub",
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", rhs.rows, rhs.cols),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| *a - *b)
                .collect(),
        })
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> S {
        dot_slices(&self.data, &self.data).sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .fold(S::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Converts entrywise through `f64` into another scalar type.
    pub fn convert<T: Scalar>(&self) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|v| T::from_f64_lossy(v.to_f64_lossy()))
                .collect(),
        }
    }
}

impl<S: Scalar> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i + j * self.rows]
    }
}

// ─── Rank-one accumulation ───────────────────────────────────────────────

/// Returns `a + scale * x * yᵀ`, consuming `a` so the accumulation happens
/// in place with no copy.
///
/// This is the BLAS-2 style kernel every update path bottoms out in; its
/// cost is exactly `rows·cols` multiply-accumulates plus `cols` scalings.
///
/// # Errors
/// [`Error::DimensionMismatch`] when `x.len() != a.rows()` or
/// `y.len() != a.cols()`.
///
/// # Example
/// ```
/// use orthup::linalg::{rank_one_accumulate, Matrix, Vector};
///
/// let a = Matrix::identity(2);
/// let x = Vector::from_vec(vec![1.0, 0.0])?;
/// let y = Vector::from_vec(vec![0.0, 1.0])?;
/// let out = rank_one_accumulate(a, &x, &y, 1.0)?;
/// assert_eq!(out.at(0, 1), 1.0);
/// assert_eq!(out.at(1, 1), 1.0);
/// # Ok::<(), orthup::Error>(())
/// ```
pub fn rank_one_accumulate<S: Scalar>(
    mut a: Matrix<S>,
    x: &Vector<S>,
    y: &Vector<S>,
    scale: S,
) -> Result<Matrix<S>> {
    if x.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            context: "rank_one_accumulate",
            expected: format!("x of length {}", a.rows()),
            got: format!("length {}", x.len()),
        });
    }
    if y.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            context: "rank_one_accumulate",
            expected: format!("y of length {}", a.cols()),
            got: format!("length {}", y.len()),
        });
    }
    a.accumulate_outer(x, y, scale);
    Ok(a)
}

// ─── Tests ───────────────────────────────────────────────────────────────
