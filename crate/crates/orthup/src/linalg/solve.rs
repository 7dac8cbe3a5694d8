//! Linear solves against a small p×p coefficient matrix.
//!
//! The workhorse is an LU factorization with partial pivoting; an upper-
//! triangular fast path skips the factorization when the caller knows the
//! structure. All solves are O(p²) after the O(p³) factorization.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Matrix, Vector};

/// LU factorization with partial pivoting: `P W = L U`.
///
/// `lu` packs the unit-lower-triangular `L` (below the diagonal) and `U`
/// (diagonal and above); `perm[i]` is the original row index that pivoting
/// moved into row `i`.
struct PluFactors<S: Scalar> {
    lu: Matrix<S>,
    perm: Vec<usize>,
}

fn pivot_threshold<S: Scalar>(w: &Matrix<S>) -> S {
    S::from_f64_lossy(w.cols() as f64) * S::epsilon() * w.max_abs()
}

fn factor<S: Scalar>(w: &Matrix<S>) -> Result<PluFactors<S>> {
    let p = w.cols();
    if w.rows() != p {
        return Err(Error::DimensionMismatch {
            context: "lu factorization",
            expected: "square matrix".into(),
            got: format!("{}x{}", w.rows(), p),
        });
    }
    let threshold = pivot_threshold(w);
    let mut lu = w.clone();
    let mut perm: Vec<usize> = (0..p).collect();

    for k in 0..p {
        let mut best = k;
        let mut best_mag = lu.at(k, k).abs();
        for i in (k + 1)..p {
            let mag = lu.at(i, k).abs();
            if mag > best_mag {
                best = i;
                best_mag = mag;
            }
        }
        if best_mag < threshold || best_mag == S::zero() {
            return Err(Error::SingularW {
                pivot: best_mag.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        if best != k {
            for j in 0..p {
                let t = lu.at(k, j);
                lu.set(k, j, lu.at(best, j));
                lu.set(best, j, t);
            }
            perm.swap(k, best);
        }
        let pivot = lu.at(k, k);
        for i in (k + 1)..p {
            let m = lu.at(i, k) / pivot;
            lu.set(i, k, m);
            for j in (k + 1)..p {
                lu.set(i, j, lu.at(i, j).mac(-m, lu.at(k, j)));
            }
        }
    }

    Ok(PluFactors { lu, perm })
}

impl<S: Scalar> PluFactors<S> {
    /// Solve `W x = rhs` using `P W = L U`: forward `L y = P rhs`, then
    /// backward `U x = y`.
    fn solve(&self, rhs: &Vector<S>) -> Vector<S> {
        let p = self.perm.len();
        let mut y = vec![S::zero(); p];
        for i in 0..p {
            let mut acc = rhs[self.perm[i]];
            for j in 0..i {
                acc = acc.mac(-self.lu.at(i, j), y[j]);
            }
            y[i] = acc;
        }
        for i in (0..p).rev() {
            let mut acc = y[i];
            for j in (i + 1)..p {
                acc = acc.mac(-self.lu.at(i, j), y[j]);
            }
            y[i] = acc / self.lu.at(i, i);
        }
        Vector::from_vec(y).expect("solve length matches factor dimension")
    }

    /// Solve `Wᵀ x = rhs` using `Wᵀ Pᵀ = Uᵀ Lᵀ`: forward `Uᵀ y = rhs`,
    /// backward `Lᵀ z = y`, then undo the permutation, `x = Pᵀ z`.
    fn solve_transposed(&self, rhs: &Vector<S>) -> Vector<S> {
        let p = self.perm.len();
        let mut y = vec![S::zero(); p];
        for i in 0..p {
            let mut acc = rhs[i];
            for j in 0..i {
                acc = acc.mac(-self.lu.at(j, i), y[j]);
            }
            y[i] = acc / self.lu.at(i, i);
        }
        for i in (0..p).rev() {
            let mut acc = y[i];
            for j in (i + 1)..p {
                acc = acc.mac(-self.lu.at(j, i), y[j]);
            }
            y[i] = acc;
        }
        let mut x = vec![S::zero(); p];
        for i in 0..p {
            x[self.perm[i]] = y[i];
        }
        Vector::from_vec(x).expect("solve length matches factor dimension")
    }
}

/// Solve `Wᵀ x = -b` for `x`.
///
/// The sign is part of the contract: the returned vector is the *negated*
/// transposed solve, which is the form every caller in this crate needs.
///
/// # Example
/// ```
/// use orthup::linalg::{solve_transposed, Matrix, Vector};
///
/// let w = Matrix::identity(2);
/// let b = Vector::from_vec(vec![1.0, 2.0]).unwrap();
/// let x = solve_transposed(&w, &b).unwrap();
/// assert_eq!(x[0], -1.0);
/// assert_eq!(x[1], -2.0);
/// ```
///
/// # Errors
/// - [`Error::DimensionMismatch`] when `w` is not square or `b` has the wrong
///   length.
/// - [`Error::SingularW`] when a pivot falls below `p · ε · max|Wᵢⱼ|`.
pub fn solve_transposed<S: Scalar>(w: &Matrix<S>, b: &Vector<S>) -> Result<Vector<S>> {
    if b.len() != w.cols() {
        return Err(Error::DimensionMismatch {
            context: "solve_transposed",
            expected: format!("rhs of length {}", w.cols()),
            got: format!("{}", b.len()),
        });
    }
    let neg_b = b.scaled(-S::one());
    Ok(factor(w)?.solve_transposed(&neg_b))
}

/// Solve `W x = rhs` (no sign flip).
pub(crate) fn solve_plain<S: Scalar>(w: &Matrix<S>, rhs: &Vector<S>) -> Result<Vector<S>> {
    if rhs.len() != w.cols() {
        return Err(Error::DimensionMismatch {
            context: "solve_plain",
            expected: format!("rhs of length {}", w.cols()),
            got: format!("{}", rhs.len()),
        });
    }
    Ok(factor(w)?.solve(rhs))
}

/// Checks invertibility by running the pivoted factorization and discarding
/// the factors.
pub(crate) fn assert_invertible<S: Scalar>(w: &Matrix<S>) -> Result<()> {
    factor(w).map(|_| ())
}

/// Solve `Wᵀ x = -b` when `W` is upper-triangular, so `Wᵀ` is lower-
/// triangular and forward substitution suffices: O(p²) with no factorization.
pub(crate) fn solve_transposed_upper_triangular<S: Scalar>(
    w: &Matrix<S>,
    b: &Vector<S>,
) -> Result<Vector<S>> {
    let p = w.cols();
    if w.rows() != p {
        return Err(Error::DimensionMismatch {
            context: "triangular solve",
            expected: "square matrix".into(),
            got: format!("{}x{}", w.rows(), p),
        });
    }
    if b.len() != p {
        return Err(Error::DimensionMismatch {
            context: "triangular solve",
            expected: format!("rhs of length {p}"),
            got: format!("{}", b.len()),
        });
    }
    let threshold = pivot_threshold(w);
    let mut x = vec![S::zero(); p];
    for j in 0..p {
        let mut acc = -b[j];
        for (k, xk) in x.iter().enumerate().take(j) {
            acc = acc.mac(-w.at(k, j), *xk);
        }
        let pivot = w.at(j, j);
        if pivot.abs() < threshold || pivot == S::zero() {
            return Err(Error::SingularW {
                pivot: pivot.abs().to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        x[j] = acc / pivot;
    }
    Vector::from_vec(x)
}
