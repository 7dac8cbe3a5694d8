//! Thin Householder QR with a positive-diagonal normalization.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Matrix;

/// Thin QR decomposition `a = Q R` of a tall (or square) matrix.
///
/// `Q` is n×p with orthonormal columns and `R` is p×p upper-triangular with
/// nonnegative diagonal. The sign normalization makes the result unique for
/// full-rank input, so re-decomposing a matrix that already has orthonormal
/// columns reproduces it (up to rounding) instead of flipping column signs.
///
/// Rank deficiency is *not* detected here — a zero column simply produces a
/// zero diagonal entry in `R`; callers that need full rank must test the
/// diagonal themselves.
///
/// # Errors
/// [`Error::DimensionMismatch`] when `a` has more columns than rows.
pub fn householder_qr<S: Scalar>(a: &Matrix<S>) -> Result<(Matrix<S>, Matrix<S>)> {
    let n = a.rows();
    let p = a.cols();
    if n < p {
        return Err(Error::DimensionMismatch {
            context: "householder_qr",
            expected: "rows >= cols".into(),
            got: format!("{n}x{p}"),
        });
    }

    // Factor in place; column k of `v` stores the k-th Householder vector
    // (nonzero from row k down), with its 2/vᵀv coefficient in `betas`.
    let mut work = a.clone();
    let mut v = Matrix::<S>::zeros(n, p);
    let mut betas = vec![S::zero(); p];
    let two = S::one() + S::one();

    for k in 0..p {
        let mut sigma2 = S::zero();
        for &x in &work.col(k)[k..] {
            sigma2 = sigma2.mac(x, x);
        }
        let sigma = sigma2.sqrt();
        if sigma == S::zero() {
            // Column already zero from the diagonal down: no reflection.
            continue;
        }
        let x0 = work.at(k, k);
        let alpha = if x0 >= S::zero() { -sigma } else { sigma };
        // v = x - alpha e1 restricted to rows k.., beta = 2 / vᵀv.
        let mut vtv = S::zero();
        {
            let col = work.col(k).to_vec();
            let vcol = v.col_mut(k);
            vcol[k] = x0 - alpha;
            vcol[(k + 1)..n].copy_from_slice(&col[(k + 1)..n]);
            for &vi in &vcol[k..] {
                vtv = vtv.mac(vi, vi);
            }
        }
        let beta = two / vtv;
        betas[k] = beta;

        // Apply H = I - beta v vᵀ to the trailing columns of `work`.
        let vcol = v.col(k);
        for j in k..p {
            let mut w = S::zero();
            for (x, vi) in work.col(j)[k..n].iter().zip(&vcol[k..n]) {
                w = w.mac(*x, *vi);
            }
            let bw = beta * w;
            for (x, vi) in work.col_mut(j)[k..n].iter_mut().zip(&vcol[k..n]) {
                *x = x.mac(-bw, *vi);
            }
        }
        work.set(k, k, alpha);
        for i in (k + 1)..n {
            work.set(i, k, S::zero());
        }
    }

    // Accumulate Q = H_0 · H_1 ··· H_{p-1} applied to the first p identity
    // columns, sweeping the reflectors from last to first.
    let mut q = Matrix::<S>::from_fn(n, p, |i, j| if i == j { S::one() } else { S::zero() });
    for k in (0..p).rev() {
        if betas[k] == S::zero() {
            continue;
        }
        let vcol = v.col(k);
        for j in 0..p {
            let mut w = S::zero();
            for (x, vi) in q.col(j)[k..n].iter().zip(&vcol[k..n]) {
                w = w.mac(*x, *vi);
            }
            let bw = betas[k] * w;
            for (x, vi) in q.col_mut(j)[k..n].iter_mut().zip(&vcol[k..n]) {
                *x = x.mac(-bw, *vi);
            }
        }
    }

    // Extract R and flip signs so every diagonal entry is nonnegative.
    let mut r = Matrix::<S>::zeros(p, p);
    for j in 0..p {
        for i in 0..=j {
            r.set(i, j, work.at(i, j));
        }
    }
    for k in 0..p {
        if r.at(k, k) < S::zero() {
            for j in k..p {
                r.set(k, j, -r.at(k, j));
            }
            for entry in q.col_mut(k).iter_mut() {
                *entry = -*entry;
            }
        }
    }

    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;

    fn sample_matrix(n: usize, p: usize) -> Matrix<f64> {
        // Deterministic, well-conditioned test input.
        Matrix::from_fn(n, p, |i, j| {
            let t = (i * p + j + 1) as f64;
            (t * 0.7).sin() + if i == j { 2.0 } else { 0.0 }
        })
    }

    #[test]
    fn reconstructs_and_orthonormalizes() {
        let a = sample_matrix(20, 6);
        let (q, r) = householder_qr(&a).unwrap();
        let qr = q.matmul(&r).unwrap();
        let resid = qr.sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        assert!(resid <= 1e-14, "reconstruction residual {resid:e}");

        let qtq = q.transpose().matmul(&q).unwrap();
        let defect = qtq.sub(&Matrix::identity(6)).unwrap().frobenius_norm();
        assert!(defect <= 1e-14, "orthonormality defect {defect:e}");

        for j in 0..6 {
            assert!(r.at(j, j) >= 0.0, "diagonal must be nonnegative");
            for i in (j + 1)..6 {
                assert_eq!(r.at(i, j), 0.0, "below-diagonal entries are exact zeros");
            }
        }
    }

    #[test]
    fn orthonormal_input_is_reproduced() {
        let a = sample_matrix(15, 4);
        let (q, _) = householder_qr(&a).unwrap();
        let (q2, r2) = householder_qr(&q).unwrap();
        let diff = q2.sub(&q).unwrap().frobenius_norm();
        assert!(diff <= 1e-13, "re-decomposition moved Q by {diff:e}");
        let rdiff = r2.sub(&Matrix::identity(4)).unwrap().frobenius_norm();
        assert!(
            rdiff <= 1e-13,
            "R of an orthonormal matrix should be I, off by {rdiff:e}"
        );
    }

    #[test]
    fn zero_column_yields_zero_diagonal() {
        let mut data = vec![0.0; 12];
        // Column 0 nonzero, column 1 zero, column 2 nonzero.
        data[0] = 1.0;
        data[8] = 2.0;
        data[9] = 1.0;
        let a = Matrix::from_vec(4, 3, data).unwrap();
        let (_, r) = householder_qr(&a).unwrap();
        assert_eq!(r.at(1, 1), 0.0);
    }

    #[test]
    fn rejects_wide_input() {
        let a: Matrix = Matrix::zeros(2, 3);
        assert!(matches!(
            householder_qr(&a),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_column_is_normalization() {
        let a: Matrix = Matrix::from_vec(3, 1, vec![3.0, 0.0, 4.0]).unwrap();
        let (q, r) = householder_qr(&a).unwrap();
        assert!((r.at(0, 0) - 5.0).abs() <= 1e-15);
        let qv = Vector::from_vec(q.col(0).to_vec()).unwrap();
        assert!((qv.norm() - 1.0).abs() <= 1e-15);
        assert!((q.at(0, 0) - 0.6).abs() <= 1e-15);
    }
}
