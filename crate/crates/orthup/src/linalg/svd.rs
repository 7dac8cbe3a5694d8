//! One-sided Jacobi SVD for small dense matrices.
//!
//! Sized for the p×p and (p+1)×p matrices that arise in low-rank updates,
//! where p stays modest; the hard cap keeps accidental misuse loud.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::orth::orthogonal_residual;
use super::{Matrix, Vector};

/// Hard upper bound on the column count accepted by [`small_svd`].
pub(crate) const MAX_COLS: usize = 64;

/// Maximum number of Jacobi sweeps before giving up.
const MAX_SWEEPS: usize = 30;

/// Result of [`small_svd`]: `a = u_factor · diag(singular_values) · v_factorᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult<S: Scalar = f64> {
    /// m×k matrix with orthonormal columns (left singular vectors).
    pub u_factor: Matrix<S>,
    /// The k singular values, sorted in descending order.
    pub singular_values: Vec<S>,
    /// k×k orthogonal matrix (right singular vectors).
    pub v_factor: Matrix<S>,
}

/// Full SVD of a small tall-or-square matrix via one-sided Jacobi rotations.
///
/// Returns factors satisfying `a ≈ u_factor · diag(σ) · v_factorᵀ` with
/// `σ` sorted descending. `v_factor` is built purely from exact plane
/// rotations, so its orthogonality holds to within a few ulps regardless of
/// the conditioning of `a`. Left vectors for zero singular values are
/// completed to an orthonormal basis from coordinate directions.
///
/// # Example
/// ```
/// use orthup::linalg::{small_svd, Matrix};
///
/// let a: Matrix = Matrix::from_rows(2, 2, &[3.0, 0.0, 0.0, 2.0]).unwrap();
/// let svd = small_svd(&a).unwrap();
/// assert!((svd.singular_values[0] - 3.0).abs() <= 1e-14);
/// assert!((svd.singular_values[1] - 2.0).abs() <= 1e-14);
/// ```
///
/// # Errors
/// - [`Error::DimensionMismatch`] when `a` is wider than tall (transpose
///   first).
/// - [`Error::TooLarge`] when `a` has more than 64 columns.
/// - [`Error::NoConvergence`] if the off-diagonal mass has not vanished
///   after 30 sweeps.
pub fn small_svd<S: Scalar>(a: &Matrix<S>) -> Result<SvdResult<S>> {
    let m = a.rows();
    let k = a.cols();
    if m < k {
        return Err(Error::DimensionMismatch {
            context: "small_svd",
            expected: "rows >= cols (transpose first)".into(),
            got: format!("{m}x{k}"),
        });
    }
    if k > MAX_COLS {
        return Err(Error::TooLarge {
            context: "small_svd",
            size: k,
            max: MAX_COLS,
        });
    }

    // One-sided Jacobi: rotate column pairs of `u` until all pairs are
    // orthogonal; `v` accumulates the same rotations.
    let mut u = a.clone();
    let mut v = Matrix::<S>::identity(k);
    let eps = S::epsilon();
    let one = S::one();

    let mut converged = k < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..(k - 1) {
            for j in (i + 1)..k {
                let mut aii = S::zero();
                let mut ajj = S::zero();
                let mut gam = S::zero();
                for (&x, &y) in u.col(i).iter().zip(u.col(j)) {
                    aii = aii.mac(x, x);
                    ajj = ajj.mac(y, y);
                    gam = gam.mac(x, y);
                }
                if gam.abs() <= eps * (aii * ajj).sqrt() {
                    continue;
                }
                rotated = true;
                let two = one + one;
                let zeta = (ajj - aii) / (two * gam);
                let t = if zeta == S::zero() {
                    one
                } else {
                    let s = if zeta > S::zero() { one } else { -one };
                    s / (zeta.abs() + (one + zeta * zeta).sqrt())
                };
                let c = one / (one + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut u, i, j, c, s);
                rotate_columns(&mut v, i, j, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    // Column norms of the rotated matrix are the singular values.
    let mut order: Vec<usize> = (0..k).collect();
    let mut sigmas = vec![S::zero(); k];
    for (idx, sigma) in sigmas.iter_mut().enumerate() {
        let mut acc = S::zero();
        for &x in u.col(idx) {
            acc = acc.mac(x, x);
        }
        *sigma = acc.sqrt();
    }
    order.sort_by(|&x, &y| {
        sigmas[y]
            .partial_cmp(&sigmas[x])
            .expect("singular values are finite")
    });

    let sigma_max = sigmas[order[0]];
    let zero_tol = sigma_max * eps * S::from_f64_lossy(m.max(k) as f64);

    let mut u_factor = Matrix::<S>::zeros(m, k);
    let mut v_factor = Matrix::<S>::zeros(k, k);
    let mut singular_values = vec![S::zero(); k];
    let mut null_cols: Vec<usize> = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let sigma = sigmas[src];
        for (row, &x) in v.col(src).iter().enumerate() {
            v_factor.set(row, dst, x);
        }
        if sigma > zero_tol && sigma > S::zero() {
            singular_values[dst] = sigma;
            let inv = one / sigma;
            for (row, &x) in u.col(src).iter().enumerate() {
                u_factor.set(row, dst, x * inv);
            }
        } else {
            null_cols.push(dst);
        }
    }

    if !null_cols.is_empty() {
        complete_left_basis(&mut u_factor, &null_cols)?;
    }

    Ok(SvdResult {
        u_factor,
        singular_values,
        v_factor,
    })
}

fn rotate_columns<S: Scalar>(m: &mut Matrix<S>, i: usize, j: usize, c: S, s: S) {
    for row in 0..m.rows() {
        let x = m.at(row, i);
        let y = m.at(row, j);
        m.set(row, i, c * x - s * y);
        m.set(row, j, s * x + c * y);
    }
}

/// Fill the listed zero columns of `u_factor` with unit vectors orthogonal
/// to every already-filled column, drawn from coordinate directions.
fn complete_left_basis<S: Scalar>(u_factor: &mut Matrix<S>, null_cols: &[usize]) -> Result<()> {
    let m = u_factor.rows();
    let mut next_candidate = 0usize;
    for &dst in null_cols {
        let mut placed = false;
        while next_candidate < m && !placed {
            let e = Vector::from_fn(m, |i| {
                if i == next_candidate {
                    S::one()
                } else {
                    S::zero()
                }
            });
            next_candidate += 1;
            // Project out the current columns; keep the residual only if the
            // candidate was far enough from their span to normalize safely.
            let basis = u_factor.clone();
            let (resid, norm) = orthogonal_residual(&basis, &e)?;
            if norm.to_f64_lossy() >= 0.5 {
                let unit = resid.scaled(S::one() / norm);
                for (row, &x) in unit.as_slice().iter().enumerate() {
                    u_factor.set(row, dst, x);
                }
                placed = true;
            }
        }
        if !placed {
            return Err(Error::RankDeficient { column: dst });
        }
    }
    Ok(())
}
