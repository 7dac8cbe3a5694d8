//! Residuals of vectors against an orthonormal column basis.
//!
//! All entry points project with classical Gram–Schmidt. The public one
//! always reorthogonalizes (two projection passes), which keeps the residual
//! orthogonal to the basis to working precision even when the input lies
//! almost entirely inside the span.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Matrix, Vector};

fn check_dims<S: Scalar>(u: &Matrix<S>, a: &Vector<S>, context: &'static str) -> Result<()> {
    if a.len() != u.rows() {
        return Err(Error::DimensionMismatch {
            context,
            expected: format!("vector of length {}", u.rows()),
            got: format!("{}", a.len()),
        });
    }
    Ok(())
}

/// Subtract the projection of `a` onto the columns of `u` once, returning
/// the coefficient vector `uᵀa` alongside the updated residual.
fn project_pass<S: Scalar>(u: &Matrix<S>, a: &Vector<S>) -> Result<(Vector<S>, Vector<S>)> {
    let coeffs = u.matvec_transposed(a)?;
    let mut resid = a.clone();
    for j in 0..u.cols() {
        let c = coeffs[j];
        let col = u.col(j);
        let r = resid.as_mut_slice();
        for (ri, &uij) in r.iter_mut().zip(col) {
            *ri = ri.mac(-c, uij);
        }
    }
    Ok((coeffs, resid))
}

/// Component of `a` orthogonal to the span of the columns of `u`, together
/// with its Euclidean norm.
///
/// `u` is assumed to have orthonormal columns; this is not validated here.
/// Two projection passes are always performed, so the returned residual is
/// orthogonal to every column of `u` to near machine precision even when
/// `a` is dominated by its in-span component.
///
/// # Example
/// ```
/// use orthup::linalg::{orthogonal_residual, Matrix, Vector};
///
/// let u = Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap();
/// let a = Vector::from_vec(vec![1.0, 1.0]).unwrap();
/// let (residual, norm) = orthogonal_residual(&u, &a).unwrap();
/// assert_eq!(residual[0], 0.0);
/// assert_eq!(residual[1], 1.0);
/// assert_eq!(norm, 1.0);
/// ```
///
/// # Errors
/// [`Error::DimensionMismatch`] when `a` has a different length than the
/// columns of `u`.
pub fn orthogonal_residual<S: Scalar>(u: &Matrix<S>, a: &Vector<S>) -> Result<(Vector<S>, S)> {
    check_dims(u, a, "orthogonal_residual")?;
    let (_, r1) = project_pass(u, a)?;
    let (_, r2) = project_pass(u, &r1)?;
    let norm = r2.norm();
    Ok((r2, norm))
}

/// Two-pass residual that also returns the total projection coefficients
/// `uᵀa` (the sum of both passes), so `a = u·coeffs + residual` holds.
pub(crate) fn residual_with_coefficients<S: Scalar>(
    u: &Matrix<S>,
    a: &Vector<S>,
) -> Result<(Vector<S>, S, Vector<S>)> {
    check_dims(u, a, "residual_with_coefficients")?;
    let (c1, r1) = project_pass(u, a)?;
    let (c2, r2) = project_pass(u, &r1)?;
    let mut coeffs = c1;
    coeffs.add_scaled_in_place(S::one(), &c2);
    let norm = r2.norm();
    Ok((r2, norm, coeffs))
}

/// Residual with a *conditional* second pass: when the first pass removes
/// more than half of `a`'s norm, the surviving component was computed with
/// significant cancellation and one reorthogonalization pass restores it.
/// Otherwise a single pass is already accurate and the extra work is skipped.
///
/// `norm_a` must be the Euclidean norm of `a`.
pub(crate) fn residual_selective<S: Scalar>(
    u: &Matrix<S>,
    a: &Vector<S>,
    norm_a: S,
) -> Result<(Vector<S>, S, Vector<S>)> {
    check_dims(u, a, "residual_selective")?;
    let (c1, r1) = project_pass(u, a)?;
    let n1 = r1.norm();
    let half = S::from_f64_lossy(0.5);
    if n1 >= half * norm_a {
        return Ok((r1, n1, c1));
    }
    let (c2, r2) = project_pass(u, &r1)?;
    let mut coeffs = c1;
    coeffs.add_scaled_in_place(S::one(), &c2);
    let norm = r2.norm();
    Ok((r2, norm, coeffs))
}
