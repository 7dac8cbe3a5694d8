//! Classical rank-one updating methods, kept as independent references for
//! the closed-form geodesic step.
//!
//! All of them reduce the n×p problem to the same (p+1)×p augmented matrix
//!
//! ```text
//! K = [ W + (Uᵀa)·bᵀ ]      so that  (U, q)·K = UW + abᵀ
//!     [   ‖q̃‖·bᵀ     ]
//! ```
//!
//! and differ in how they restore structure: [`brand_update`] takes a small
//! SVD of `K` (O(np²) total), [`kaufman_update`] re-triangularizes `K` with
//! Givens rotations, [`elementary_update`] reorthonormalizes a single
//! column in the `W = I` case, and [`full_refactor`] ignores the factored
//! form entirely. [`wedderburn_classify`] decides, before any update, which
//! regime an `(a, b)` pair falls into.

use crate::error::{Error, Result};
use crate::linalg::orth::residual_with_coefficients;
use crate::linalg::qr::householder_qr;
use crate::linalg::solve::solve_plain;
use crate::linalg::svd::MAX_COLS;
use crate::linalg::{dot_slices, rank_one_accumulate, small_svd, Matrix, Vector};
use crate::scalar::Scalar;
use crate::update::{
    sign_or_one, Factorization, OrthonormalFactor, RankOneUpdate, WKind, DEFAULT_DEFLATION_TOL,
};

/// Relative tolerance for the range and regularity tests of
/// [`wedderburn_classify`] (at `f64`; calibrated elsewhere). Classification
/// near this threshold is inherently ill-posed: an `a` whose residual is
/// comparable to `tol·‖a‖` is neither clearly inside nor outside `ran(X)`.
pub const WEDDERBURN_TOL: f64 = 1e-10;

/// The (p+1)×p augmented matrix through which the classical methods factor
/// a rank-one update.
#[derive(Debug, Clone)]
pub struct AugmentedFactor<S: Scalar = f64> {
    mat: Matrix<S>,
}

impl<S: Scalar> AugmentedFactor<S> {
    /// Wraps a matrix with one more row than columns.
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] for any other shape.
    pub fn new(mat: Matrix<S>) -> Result<Self> {
        if mat.rows() != mat.cols() + 1 {
            return Err(Error::DimensionMismatch {
                context: "AugmentedFactor::new",
                expected: "(p+1) x p".into(),
                got: format!("{}x{}", mat.rows(), mat.cols()),
            });
        }
        Ok(Self { mat })
    }

    /// Builds `K = [W + (Uᵀa)bᵀ; ‖q̃‖bᵀ]` for the update `X + abᵀ`,
    /// together with the unit residual direction `q`, so that
    /// `(U, q)·K = UW + abᵀ`.
    ///
    /// # Errors
    /// [`Error::ZeroB`] for `b = 0`, [`Error::InRange`] when `a` has no
    /// usable residual outside `ran(U)`, or a dimension mismatch.
    pub fn from_update(f: &Factorization<S>, up: &RankOneUpdate<S>) -> Result<(Self, Vector<S>)> {
        let (n, p) = f.dims();
        if up.a.len() != n || up.b.len() != p {
            return Err(Error::DimensionMismatch {
                context: "AugmentedFactor::from_update",
                expected: format!("a of length {n}, b of length {p}"),
                got: format!("a of length {}, b of length {}", up.a.len(), up.b.len()),
            });
        }
        if up.b.is_zero() {
            return Err(Error::ZeroB);
        }
        let norm_a = up.a.norm();
        let (q_tilde, q_norm, coeffs) = residual_with_coefficients(f.u().mat(), &up.a)?;
        let eff_tol = S::calibrated(DEFAULT_DEFLATION_TOL) * norm_a.max(S::one());
        if q_norm <= eff_tol {
            return Err(Error::InRange {
                residual_norm: q_norm.to_f64_lossy(),
                tol: eff_tol.to_f64_lossy(),
            });
        }
        let q = q_tilde.scaled(S::one() / q_norm);
        let mat = Matrix::from_fn(p + 1, p, |i, j| {
            let lift = if i < p { coeffs[i] } else { q_norm };
            let base = if i < p { f.w().at(i, j) } else { S::zero() };
            base.mac(lift, up.b[j])
        });
        Ok((Self { mat }, q))
    }

    /// The augmented matrix.
    pub fn mat(&self) -> &Matrix<S> {
        &self.mat
    }
}

/// Assembles `(U, q)·M` for a (p+1)-row factor `M`: `U·M_top + q·m_bottom`.
fn expand_basis<S: Scalar>(
    u: &OrthonormalFactor<S>,
    q: &Vector<S>,
    m: &Matrix<S>,
) -> Result<Matrix<S>> {
    let p = u.cols();
    let cols = m.cols();
    if m.rows() != p + 1 {
        return Err(Error::DimensionMismatch {
            context: "expand_basis",
            expected: format!("{} rows", p + 1),
            got: format!("{}", m.rows()),
        });
    }
    let top = Matrix::from_fn(p, cols, |i, j| m.at(i, j));
    let bottom = Vector::from_fn(cols, |j| m.at(p, j));
    rank_one_accumulate(u.mat().matmul(&top)?, q, &bottom, S::one())
}

/// SVD-style rank-one update: decomposes the (p+1)×p augmented matrix `K`
/// as `U'ΣV'ᵀ` and returns the updated orthonormal factor `(U, q)·U'`.
///
/// Cost O(np²) — the small SVD itself is O(p³), and the basis expansion
/// dominates. Requires `p ≤ 63` so `K` fits the small-SVD guard.
///
/// # Errors
/// [`Error::InRange`] / [`Error::ZeroB`] from the augmented build,
/// [`Error::TooLarge`] for p > 63, or SVD non-convergence.
pub fn brand_update<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
) -> Result<OrthonormalFactor<S>> {
    let (u_new, _) = brand_update_factored(f, up)?;
    Ok(u_new)
}

/// [`brand_update`] keeping the companion factor: returns
/// `(U_new, Σ·V'ᵀ)` so that `U_new·(ΣV'ᵀ) = UW + abᵀ`. The second factor
/// is a diagonal scaling of an orthogonal matrix ([`WKind::DiagonalTimesOrthogonal`]).
pub(crate) fn brand_update_factored<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
) -> Result<(OrthonormalFactor<S>, Matrix<S>)> {
    let p = f.dims().1;
    if p + 1 > MAX_COLS {
        return Err(Error::TooLarge {
            context: "brand_update",
            size: p,
            max: MAX_COLS - 1,
        });
    }
    let (aug, q) = AugmentedFactor::from_update(f, up)?;
    let svd = small_svd(aug.mat())?;
    let u_new = OrthonormalFactor::new_unchecked(expand_basis(f.u(), &q, &svd.u_factor)?);
    let w_new = Matrix::from_fn(p, p, |i, j| svd.singular_values[i] * svd.v_factor.at(j, i));
    Ok((u_new, w_new))
}

/// QR-style rank-one update: restores the augmented matrix `K̃` to
/// upper-trapezoidal form with Givens rotations and returns
/// `((U, q)·Q̂ truncated to p columns, R̂)` with `U_new·R̂ = UW + abᵀ`
/// and `R̂` upper-triangular (exact zeros below the diagonal).
///
/// # Errors
/// [`Error::InRange`] / [`Error::ZeroB`] from the augmented build, or a
/// dimension mismatch.
pub fn kaufman_update<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
) -> Result<(OrthonormalFactor<S>, Matrix<S>)> {
    let (u_new, r_hat, _) = kaufman_update_counted(f, up)?;
    Ok((u_new, r_hat))
}

/// [`kaufman_update`] also reporting how many Givens rotations were applied
/// (entries that are already exactly zero are skipped, so structured inputs
/// need as few as one rotation).
pub(crate) fn kaufman_update_counted<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
) -> Result<(OrthonormalFactor<S>, Matrix<S>, usize)> {
    let p = f.dims().1;
    let (aug, q) = AugmentedFactor::from_update(f, up)?;
    let mut k = aug.mat().clone();
    let mut q_hat = Matrix::<S>::identity(p + 1);
    let mut rotations = 0usize;

    for j in 0..p {
        for i in (j + 1)..=p {
            let g = k.at(i, j);
            if g == S::zero() {
                continue;
            }
            let fdiag = k.at(j, j);
            let r = fdiag.hypot(g);
            let (c, s) = (fdiag / r, g / r);
            rotations += 1;
            for col in 0..p {
                let top = k.at(j, col);
                let low = k.at(i, col);
                k.set(j, col, c * top + s * low);
                k.set(i, col, -s * top + c * low);
            }
            k.set(j, j, r);
            k.set(i, j, S::zero());
            for row in 0..=p {
                let left = q_hat.at(row, j);
                let right = q_hat.at(row, i);
                q_hat.set(row, j, c * left + s * right);
                q_hat.set(row, i, -s * left + c * right);
            }
        }
    }

    let q_hat_cols = Matrix::from_fn(p + 1, p, |i, j| q_hat.at(i, j));
    let u_new = OrthonormalFactor::new_unchecked(expand_basis(f.u(), &q, &q_hat_cols)?);
    let r_hat = Matrix::from_fn(p, p, |i, j| if i <= j { k.at(i, j) } else { S::zero() });
    Ok((u_new, r_hat, rotations))
}

/// Coordinate-change update for the `W = I` case `X_new = U + abᵀ`:
/// reorthonormalizes the single mixed direction in closed form,
///
/// ```text
/// U_new = U + v·w'ᵀ,   w' = b/‖b‖,
/// v = (σc/(‖q̃‖·‖g‖) − 1)·U·w' + (σ‖b‖/‖g‖)·q
/// ```
///
/// with `c = 1 + aᵀUb`, `σ = sign(c)` (`sign(0) := +1`), and
/// `‖g‖ = √(‖b‖² + (c/‖q̃‖)²)`. The sign factor pins the representative so
/// the output matches [`crate::update::update_u`] entrywise, not merely as
/// a subspace; without it, `c < 0` flips one column. No intermediate n×p
/// matrix is formed.
///
/// # Errors
/// [`Error::ZeroB`] for `b = 0`, [`Error::InRange`] when `a ∈ ran(U)`, or
/// a dimension mismatch.
pub fn elementary_update<S: Scalar>(
    u: &OrthonormalFactor<S>,
    up: &RankOneUpdate<S>,
) -> Result<OrthonormalFactor<S>> {
    if up.a.len() != u.rows() || up.b.len() != u.cols() {
        return Err(Error::DimensionMismatch {
            context: "elementary_update",
            expected: format!("a of length {}, b of length {}", u.rows(), u.cols()),
            got: format!("a of length {}, b of length {}", up.a.len(), up.b.len()),
        });
    }
    if up.b.is_zero() {
        return Err(Error::ZeroB);
    }
    let norm_b = up.b.norm();
    let norm_a = up.a.norm();
    let (q_tilde, q_norm, coeffs) = residual_with_coefficients(u.mat(), &up.a)?;
    let eff_tol = S::calibrated(DEFAULT_DEFLATION_TOL) * norm_a.max(S::one());
    if q_norm <= eff_tol {
        return Err(Error::InRange {
            residual_norm: q_norm.to_f64_lossy(),
            tol: eff_tol.to_f64_lossy(),
        });
    }
    let c = S::one() + dot_slices(coeffs.as_slice(), up.b.as_slice());
    let sigma = sign_or_one(c);
    let omega = c / q_norm;
    let g_norm = (norm_b * norm_b + omega * omega).sqrt();
    let coef_u = sigma * omega / g_norm - S::one();
    let coef_q = sigma * norm_b / g_norm;

    let w_prime = up.b.scaled(S::one() / norm_b);
    let mut v = u.mat().matvec(&w_prime)?.scaled(coef_u);
    v.add_scaled_in_place(coef_q / q_norm, &q_tilde);
    let mat = rank_one_accumulate(u.mat().clone(), &v, &w_prime, S::one())?;
    Ok(OrthonormalFactor::new_unchecked(mat))
}

/// Factorizes `X` from scratch by Householder QR — the O(np²) baseline the
/// closed-form update is measured against. `W` comes back upper-triangular.
///
/// # Errors
/// [`Error::RankDeficient`] at the first diagonal entry of `R` below
/// `p·ε·max|Xᵢⱼ|`, [`Error::DimensionMismatch`] for wide `X`.
pub fn full_refactor<S: Scalar>(x: &Matrix<S>) -> Result<Factorization<S>> {
    let p = x.cols();
    let (q, r) = householder_qr(x)?;
    let threshold = S::from_f64_lossy(p as f64) * S::epsilon() * x.max_abs();
    for k in 0..p {
        let pivot = r.at(k, k);
        if pivot.abs() < threshold || pivot == S::zero() {
            return Err(Error::RankDeficient { column: k });
        }
    }
    Ok(Factorization::new_unchecked(
        OrthonormalFactor::new_unchecked(q),
        r,
        WKind::UpperTriangular,
    ))
}

/// Which regime a rank-one update falls into, decided before updating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassificationKind {
    /// `a ∉ ran(X)`: the generic case; the subspace moves.
    OutOfRange,
    /// `a = Xx` and `I_p + x bᵀ` is regular: the span is preserved.
    InRangeRegular,
    /// `a = Xx` and `1 + bᵀx ≈ 0`: the update drops the rank by one.
    InRangeDeflating,
}

/// Result of [`wedderburn_classify`]: the regime, and for in-range updates
/// the coordinates `x` with `a = Xx`.
#[derive(Debug, Clone)]
pub struct UpdateClassification<S: Scalar = f64> {
    /// The detected regime.
    pub kind: ClassificationKind,
    /// Present exactly when `kind ≠ OutOfRange`.
    pub coeffs: Option<Vector<S>>,
}

/// Classifies `X + abᵀ` by the Wedderburn rank-reduction test: out of range
/// when `‖(I − UUᵀ)a‖ > tol·‖a‖`; otherwise solve `UWx = a` and test
/// `|1 + bᵀx|` against the calibrated [`WEDDERBURN_TOL`] — zero means the
/// update annihilates the direction `x` and the rank drops by exactly one.
///
/// # Example
/// ```
/// use orthup::{Factorization, Matrix, OrthonormalFactor, RankOneUpdate, Vector, WKind};
/// use orthup::baselines::{wedderburn_classify, ClassificationKind};
///
/// let u = OrthonormalFactor::new(Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap()).unwrap();
/// let f = Factorization::new(u, Matrix::identity(1), WKind::General).unwrap();
/// let deflating = RankOneUpdate {
///     a: Vector::from_vec(vec![-1.0, 0.0]).unwrap(),
///     b: Vector::from_vec(vec![1.0]).unwrap(),
/// };
/// let cls = wedderburn_classify(&f, &deflating).unwrap();
/// assert_eq!(cls.kind, ClassificationKind::InRangeDeflating);
/// assert_eq!(cls.coeffs.unwrap()[0], -1.0);
/// ```
///
/// # Errors
/// [`Error::SingularW`] from the solve, or a dimension mismatch.
pub fn wedderburn_classify<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
) -> Result<UpdateClassification<S>> {
    let (n, p) = f.dims();
    if up.a.len() != n || up.b.len() != p {
        return Err(Error::DimensionMismatch {
            context: "wedderburn_classify",
            expected: format!("a of length {n}, b of length {p}"),
            got: format!("a of length {}, b of length {}", up.a.len(), up.b.len()),
        });
    }
    let tol = S::calibrated(WEDDERBURN_TOL);
    let norm_a = up.a.norm();
    let (_, q_norm, coeffs) = residual_with_coefficients(f.u().mat(), &up.a)?;
    if q_norm > tol * norm_a {
        return Ok(UpdateClassification {
            kind: ClassificationKind::OutOfRange,
            coeffs: None,
        });
    }
    let x = solve_plain(f.w(), &coeffs)?;
    let d = dot_slices(up.b.as_slice(), x.as_slice());
    let kind = if (S::one() + d).abs() > tol * d.abs().max(S::one()) {
        ClassificationKind::InRangeRegular
    } else {
        ClassificationKind::InRangeDeflating
    };
    Ok(UpdateClassification {
        kind,
        coeffs: Some(x),
    })
}
