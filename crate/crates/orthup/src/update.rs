//! Closed-form rank-one updating of an orthogonal factorization.
//!
//! Given `X = U W` with `U ∈ St(n,p)` (orthonormal columns) and invertible
//! `W`, a rank-one change `X_new = X + a bᵀ` moves the column span of `X`
//! within the Grassmann manifold. When `a` has a component outside `ran(U)`,
//! the new span is reached exactly by rotating one direction of `U` toward
//! the normalized residual `q`, and both factors are repaired in `O(np)`:
//!
//! ```text
//! q̃ = (I − UUᵀ)a          w̃ = −W⁻ᵀb          w = w̃/‖w̃‖
//! ω = (1 − (Uᵀa)ᵀw̃)/‖q̃‖   g = √(‖w̃‖² + ω²)
//! α = |ω|/g − 1            β = −sign(ω)·‖w̃‖/g
//! U_new = U + (α·Uw + β·q)·wᵀ
//! W_new = W + (Uᵀa + γ·w)·bᵀ,   γ = β‖q̃‖ − α‖q̃‖ω/‖w̃‖
//! ```
//!
//! The rotation angle is `t* = arcsin(β)`, and the Riemannian distance moved
//! is `arccos(|ω|/g)` — `U_new` is the endpoint of a rank-one geodesic.
//!
//! When `a ∈ ran(U)` the span either stays fixed (the update is absorbed
//! into `W`) or the matrix loses rank (deflation) and no p-column
//! orthonormal representative of `ran(X_new)` exists; [`rank_one_update`]
//! dispatches between these cases.

use crate::error::{Error, Result};
use crate::linalg::orth::residual_selective;
use crate::linalg::solve::{
    assert_invertible, solve_plain, solve_transposed, solve_transposed_upper_triangular,
};
use crate::linalg::{dot_slices, rank_one_accumulate, Matrix, Vector};
use crate::scalar::Scalar;

use std::fmt;
use std::str::FromStr;

// ─── tolerances ──────────────────────────────────────────────────────────

/// Default threshold on `‖q̃‖/max(1, ‖a‖)` below which `a` is treated as
/// lying in `ran(U)`. Stated for `f64`; scaled by [`Scalar::calibrated`]
/// for other precisions.
pub const DEFAULT_DEFLATION_TOL: f64 = 1e-12;

/// Orthonormality defect `‖UᵀU − I‖_F` accepted by
/// [`OrthonormalFactor::new`] (at `f64`; calibrated elsewhere).
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Regularity margin for `|1 + bᵀx|` in the in-range classification
/// (at `f64`; calibrated elsewhere).
pub const REGULARITY_TOL: f64 = 1e-10;

#[inline]
pub(crate) fn sign_or_one<S: Scalar>(x: S) -> S {
    if x < S::zero() {
        -S::one()
    } else {
        S::one()
    }
}

// ─── domain types ────────────────────────────────────────────────────────

/// An n×p matrix with orthonormal columns — a Stiefel representative of a
/// p-dimensional subspace of Rⁿ.
#[derive(Debug, Clone)]
pub struct OrthonormalFactor<S: Scalar = f64> {
    mat: Matrix<S>,
}

impl<S: Scalar> OrthonormalFactor<S> {
    /// Validates orthonormality: `‖matᵀmat − I‖_F` must not exceed the
    /// calibrated [`ORTHONORMALITY_TOL`].
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] for wide input,
    /// [`Error::NotOrthonormal`] when the defect is too large.
    pub fn new(mat: Matrix<S>) -> Result<Self> {
        if mat.rows() < mat.cols() {
            return Err(Error::DimensionMismatch {
                context: "OrthonormalFactor::new",
                expected: "rows >= cols".into(),
                got: format!("{}x{}", mat.rows(), mat.cols()),
            });
        }
        let candidate = Self { mat };
        let defect = candidate.orthonormality_defect();
        let tol = S::calibrated(ORTHONORMALITY_TOL);
        if !(defect <= tol) {
            return Err(Error::NotOrthonormal {
                context: "OrthonormalFactor::new",
                defect: defect.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
        Ok(candidate)
    }

    /// Wraps without the O(np²) orthonormality check — for matrices that
    /// are orthonormal by construction (QR output, update formulas).
    pub fn new_unchecked(mat: Matrix<S>) -> Self {
        debug_assert!(mat.rows() >= mat.cols());
        Self { mat }
    }

    /// The underlying n×p matrix.
    pub fn mat(&self) -> &Matrix<S> {
        &self.mat
    }

    /// Ambient dimension n.
    pub fn rows(&self) -> usize {
        self.mat.rows()
    }

    /// Subspace dimension p.
    pub fn cols(&self) -> usize {
        self.mat.cols()
    }

    /// `‖matᵀmat − I_p‖_F`, the measured deviation from orthonormality.
    pub fn orthonormality_defect(&self) -> S {
        let p = self.mat.cols();
        let gram = self
            .mat
            .transpose()
            .matmul(&self.mat)
            .expect("transpose product is always conformable");
        let mut acc = S::zero();
        for j in 0..p {
            for i in 0..p {
                let target = if i == j { S::one() } else { S::zero() };
                let d = gram.at(i, j) - target;
                acc = acc.mac(d, d);
            }
        }
        acc.sqrt()
    }

    /// Re-expresses the factor in another scalar type.
    pub fn convert<T: Scalar>(&self) -> OrthonormalFactor<T> {
        OrthonormalFactor {
            mat: self.mat.convert(),
        }
    }
}

/// Structural knowledge about the `W` factor, used to pick solve paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WKind {
    /// No exploitable structure.
    General,
    /// Exactly zero below the diagonal (QR provenance).
    UpperTriangular,
    /// A diagonal scaling times an orthogonal matrix (SVD provenance).
    DiagonalTimesOrthogonal,
}

/// A factorization `X = U W` of an n×p matrix: orthonormal `U` and square
/// invertible `W` with a structure tag.
#[derive(Debug, Clone)]
pub struct Factorization<S: Scalar = f64> {
    u: OrthonormalFactor<S>,
    w: Matrix<S>,
    w_kind: WKind,
}

impl<S: Scalar> Factorization<S> {
    /// Validates shape agreement, invertibility of `w` (partial-pivot test),
    /// and — when `w_kind` claims triangularity — that the entries below the
    /// diagonal are exactly zero.
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`], [`Error::SingularW`], or
    /// [`Error::InvalidConfig`] for a false structure claim.
    pub fn new(u: OrthonormalFactor<S>, w: Matrix<S>, w_kind: WKind) -> Result<Self> {
        let p = u.cols();
        if w.rows() != p || w.cols() != p {
            return Err(Error::DimensionMismatch {
                context: "Factorization::new",
                expected: format!("{p}x{p} W factor"),
                got: format!("{}x{}", w.rows(), w.cols()),
            });
        }
        if w_kind == WKind::UpperTriangular {
            for j in 0..p {
                for i in (j + 1)..p {
                    if w.at(i, j) != S::zero() {
                        return Err(Error::InvalidConfig {
                            message: format!(
                                "W tagged UpperTriangular but entry ({i}, {j}) is nonzero"
                            ),
                        });
                    }
                }
            }
        }
        assert_invertible(&w)?;
        Ok(Self { u, w, w_kind })
    }

    /// Wraps without validation — for factors produced by code that already
    /// guarantees the invariants.
    pub fn new_unchecked(u: OrthonormalFactor<S>, w: Matrix<S>, w_kind: WKind) -> Self {
        debug_assert_eq!(u.cols(), w.rows());
        debug_assert_eq!(w.rows(), w.cols());
        Self { u, w, w_kind }
    }

    /// The orthonormal factor.
    pub fn u(&self) -> &OrthonormalFactor<S> {
        &self.u
    }

    /// The square coefficient factor.
    pub fn w(&self) -> &Matrix<S> {
        &self.w
    }

    /// Structure tag of the coefficient factor.
    pub fn w_kind(&self) -> WKind {
        self.w_kind
    }

    /// `(n, p)` of the factored matrix.
    pub fn dims(&self) -> (usize, usize) {
        (self.u.rows(), self.u.cols())
    }

    /// Materializes `X = U W` (O(np²); for verification and I/O).
    pub fn reconstruct(&self) -> Matrix<S> {
        self.u
            .mat()
            .matmul(&self.w)
            .expect("factor shapes agree by construction")
    }

    /// Re-expresses the factorization in another scalar type.
    pub fn convert<T: Scalar>(&self) -> Factorization<T> {
        Factorization {
            u: self.u.convert(),
            w: self.w.convert(),
            w_kind: self.w_kind,
        }
    }
}

/// The rank-one change `X ↦ X + a bᵀ`: `a` has length n, `b` has length p.
#[derive(Debug, Clone)]
pub struct RankOneUpdate<S: Scalar = f64> {
    /// Column direction (length n).
    pub a: Vector<S>,
    /// Coefficient direction (length p).
    pub b: Vector<S>,
}

impl<S: Scalar> RankOneUpdate<S> {
    /// Re-expresses the update in another scalar type.
    pub fn convert<T: Scalar>(&self) -> RankOneUpdate<T> {
        RankOneUpdate {
            a: self.a.convert(),
            b: self.b.convert(),
        }
    }
}

/// Every intermediate quantity of the closed-form update, exposed so the
/// geometry layer can reuse them and tests can check the internal algebra.
#[derive(Debug, Clone)]
pub struct UpdateQuantities<S: Scalar = f64> {
    /// Residual `(I − UUᵀ)a`.
    pub q_tilde: Vector<S>,
    /// `‖q̃‖`.
    pub q_tilde_norm: S,
    /// Unit residual direction `q̃/‖q̃‖`.
    pub q: Vector<S>,
    /// `−W⁻ᵀ b`.
    pub w_tilde: Vector<S>,
    /// `‖w̃‖`.
    pub w_tilde_norm: S,
    /// Unit coefficient direction `w̃/‖w̃‖`.
    pub w_unit: Vector<S>,
    /// `(1 − (Uᵀa)ᵀ w̃)/‖q̃‖`.
    pub omega: S,
    /// `√(‖w̃‖² + ω²)`.
    pub g_norm: S,
    /// `|ω|/‖g‖ − 1 ∈ [−1, 0]`.
    pub alpha: S,
    /// `−sign(ω)·‖w̃‖/‖g‖` (with `sign(0) := +1`).
    pub beta: S,
    /// `β‖q̃‖ − α‖q̃‖ω/‖w̃‖`, the coefficient that repairs `W`.
    pub gamma: S,
    /// Rotation angle `arcsin(β)` of the geodesic step, in radians.
    pub t_star: S,
    /// Cached projection coefficients `Uᵀa`, so the `W` update needs no
    /// second O(np) pass.
    pub projected_a: Vector<S>,
}

/// How a dispatched update was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    /// `a ∉ ran(U)`: the subspace moved; both factors were updated.
    Generic,
    /// `a ∈ ran(U)` and the span is preserved; only `W` changed.
    InRangeRegular,
    /// `a ∈ ran(U)` and the rank drops — no updated factorization exists.
    Deflating,
    /// `b = 0`: the matrix is unchanged.
    NoOp,
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            OutcomeKind::Generic => "Generic",
            OutcomeKind::InRangeRegular => "InRangeRegular",
            OutcomeKind::Deflating => "Deflating",
            OutcomeKind::NoOp => "NoOp",
        };
        f.write_str(name)
    }
}

impl FromStr for OutcomeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Generic" => Ok(OutcomeKind::Generic),
            "InRangeRegular" => Ok(OutcomeKind::InRangeRegular),
            "Deflating" => Ok(OutcomeKind::Deflating),
            "NoOp" => Ok(OutcomeKind::NoOp),
            other => Err(Error::InvalidConfig {
                message: format!("unknown outcome kind {other:?}"),
            }),
        }
    }
}

/// Result of a dispatched rank-one update.
#[derive(Debug, Clone)]
pub struct UpdateOutcome<S: Scalar = f64> {
    /// Which branch resolved the update.
    pub kind: OutcomeKind,
    /// The updated factorization.
    pub factorization: Factorization<S>,
    /// Riemannian distance between the old and new subspaces, in radians;
    /// zero for every non-[`Generic`](OutcomeKind::Generic) kind.
    pub distance: S,
    /// The internal quantities — present only for generic updates.
    pub quantities: Option<UpdateQuantities<S>>,
}

// ─── quantity computation ────────────────────────────────────────────────

fn check_dims<S: Scalar>(f: &Factorization<S>, up: &RankOneUpdate<S>) -> Result<()> {
    let (n, p) = f.dims();
    if up.a.len() != n || up.b.len() != p {
        return Err(Error::DimensionMismatch {
            context: "rank-one update",
            expected: format!("a of length {n}, b of length {p}"),
            got: format!("a of length {}, b of length {}", up.a.len(), up.b.len()),
        });
    }
    Ok(())
}

/// Finishes the quantity computation once the residual of `a` is in hand.
fn quantities_from_parts<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
    q_tilde: Vector<S>,
    q_tilde_norm: S,
    projected_a: Vector<S>,
) -> Result<UpdateQuantities<S>> {
    let q = q_tilde.scaled(S::one() / q_tilde_norm);
    let w_tilde = match f.w_kind() {
        WKind::UpperTriangular => solve_transposed_upper_triangular(f.w(), &up.b)?,
        _ => solve_transposed(f.w(), &up.b)?,
    };
    let w_tilde_norm = w_tilde.norm();
    if w_tilde_norm == S::zero() {
        return Err(Error::ZeroB);
    }
    let w_unit = w_tilde.scaled(S::one() / w_tilde_norm);

    let a_dot_w = dot_slices(projected_a.as_slice(), w_tilde.as_slice());
    let omega = (S::one() - a_dot_w) / q_tilde_norm;
    let g_norm = (w_tilde_norm * w_tilde_norm + omega * omega).sqrt();
    let alpha = omega.abs() / g_norm - S::one();
    let beta = -sign_or_one(omega) * w_tilde_norm / g_norm;
    let gamma = beta * q_tilde_norm - alpha * q_tilde_norm * omega / w_tilde_norm;
    let t_star = beta.asin();

    Ok(UpdateQuantities {
        q_tilde,
        q_tilde_norm,
        q,
        w_tilde,
        w_tilde_norm,
        w_unit,
        omega,
        g_norm,
        alpha,
        beta,
        gamma,
        t_star,
        projected_a,
    })
}

/// Computes all update quantities with the default deflation tolerance.
///
/// See [`compute_quantities_with_tol`] for the contract.
pub fn compute_quantities<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
) -> Result<UpdateQuantities<S>> {
    compute_quantities_with_tol(f, up, S::calibrated(DEFAULT_DEFLATION_TOL))
}

/// Computes the closed-form update quantities for `X + a bᵀ`.
///
/// Requires `b ≠ 0` and `a ∉ ran(U)`, the latter detected by
/// `‖q̃‖ > tol·max(1, ‖a‖)` — the tolerance is made scale-aware so the test
/// behaves identically for tiny-norm and unit-norm `a`.
///
/// # Example
/// ```
/// use orthup::{Factorization, Matrix, OrthonormalFactor, RankOneUpdate, Vector, WKind};
/// use orthup::update::compute_quantities;
///
/// let u = OrthonormalFactor::new(Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap()).unwrap();
/// let w = Matrix::identity(1);
/// let f = Factorization::new(u, w, WKind::General).unwrap();
/// let up = RankOneUpdate {
///     a: Vector::from_vec(vec![0.0, 1.0]).unwrap(),
///     b: Vector::from_vec(vec![1.0]).unwrap(),
/// };
/// let qty = compute_quantities(&f, &up).unwrap();
/// assert_eq!(qty.omega, 1.0);
/// assert!((qty.g_norm - 2.0_f64.sqrt()).abs() <= 1e-15);
/// ```
///
/// # Errors
/// - [`Error::ZeroB`] when `b = 0` (or `W⁻ᵀb` underflows to zero).
/// - [`Error::InRange`] when `‖q̃‖ ≤ tol·max(1, ‖a‖)`.
/// - [`Error::SingularW`] from the solve against `W`.
/// - [`Error::DimensionMismatch`] on shape disagreement.
pub fn compute_quantities_with_tol<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
    tol: S,
) -> Result<UpdateQuantities<S>> {
    check_dims(f, up)?;
    if up.b.is_zero() {
        return Err(Error::ZeroB);
    }
    let norm_a = up.a.norm();
    let (q_tilde, q_tilde_norm, projected_a) = residual_selective(f.u().mat(), &up.a, norm_a)?;
    let eff_tol = tol * norm_a.max(S::one());
    if q_tilde_norm <= eff_tol {
        return Err(Error::InRange {
            residual_norm: q_tilde_norm.to_f64_lossy(),
            tol: eff_tol.to_f64_lossy(),
        });
    }
    quantities_from_parts(f, up, q_tilde, q_tilde_norm, projected_a)
}

// ─── factor updates ──────────────────────────────────────────────────────

/// Applies the closed-form rotation to the orthonormal factor:
/// `U_new = U + (α·U·w + β·q)·wᵀ`.
///
/// Cost: two matrix–vector products and one rank-one accumulation, O(np).
/// The result is orthonormal by the identity `(1+α)² + β² = 1`, so no
/// re-validation is performed.
///
/// # Errors
/// Propagated dimension mismatches only.
pub fn update_u<S: Scalar>(
    u: &OrthonormalFactor<S>,
    qty: &UpdateQuantities<S>,
) -> Result<OrthonormalFactor<S>> {
    let alpha_w = qty.w_unit.scaled(qty.alpha);
    let mut x = u.mat().matvec(&alpha_w)?;
    if x.len() != qty.q.len() {
        return Err(Error::DimensionMismatch {
            context: "update_u",
            expected: format!("q of length {}", x.len()),
            got: format!("{}", qty.q.len()),
        });
    }
    x.add_scaled_in_place(qty.beta, &qty.q);
    let mat = rank_one_accumulate(u.mat().clone(), &x, &qty.w_unit, S::one())?;
    Ok(OrthonormalFactor::new_unchecked(mat))
}

/// Applies the companion update to the coefficient factor:
/// `W_new = W + (Uᵀa + γ·w)·bᵀ`, so that `U_new·W_new = UW + abᵀ`.
///
/// `Uᵀa` is taken from [`UpdateQuantities::projected_a`] (computed during
/// the residual pass); `u` is accepted for shape validation against the
/// quantities. Cost: O(p²).
///
/// # Errors
/// Propagated dimension mismatches only.
pub fn update_w<S: Scalar>(
    w: &Matrix<S>,
    qty: &UpdateQuantities<S>,
    up: &RankOneUpdate<S>,
    u: &OrthonormalFactor<S>,
) -> Result<Matrix<S>> {
    let p = w.cols();
    if w.rows() != p
        || u.cols() != p
        || qty.projected_a.len() != p
        || qty.w_unit.len() != p
        || up.b.len() != p
    {
        return Err(Error::DimensionMismatch {
            context: "update_w",
            expected: format!("p = {p} across W, U, quantities, and b"),
            got: format!(
                "W {}x{}, U cols {}, coeffs {}, w {}, b {}",
                w.rows(),
                p,
                u.cols(),
                qty.projected_a.len(),
                qty.w_unit.len(),
                up.b.len()
            ),
        });
    }
    let mut v = qty.projected_a.clone();
    v.add_scaled_in_place(qty.gamma, &qty.w_unit);
    rank_one_accumulate(w.clone(), &v, &up.b, S::one())
}

// ─── dispatch ────────────────────────────────────────────────────────────

/// In-range classification: with `a = U·coeffs`, the span of `X + abᵀ` is
/// preserved exactly when `I_p + x bᵀ` is regular for `x = W⁻¹·coeffs`,
/// i.e. when `1 + bᵀx` is safely away from zero.
pub(crate) fn regular_after_in_range<S: Scalar>(
    w: &Matrix<S>,
    a_coeffs: &Vector<S>,
    b: &Vector<S>,
) -> Result<bool> {
    let x = solve_plain(w, a_coeffs)?;
    let d = dot_slices(b.as_slice(), x.as_slice());
    let margin = S::calibrated(REGULARITY_TOL) * d.abs().max(S::one());
    Ok((S::one() + d).abs() > margin)
}

/// Applies `X ↦ X + a bᵀ` to a factorization with the default deflation
/// tolerance. See [`rank_one_update_with_tol`].
pub fn rank_one_update<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
) -> Result<UpdateOutcome<S>> {
    rank_one_update_with_tol(f, up, S::calibrated(DEFAULT_DEFLATION_TOL))
}

/// Applies `X ↦ X + a bᵀ` to a factorization, dispatching on the geometry
/// of the update:
///
/// - `b = 0` → [`OutcomeKind::NoOp`]: nothing changes, distance 0.
/// - `‖q̃‖ ≤ tol·max(1, ‖a‖)` (so `a ∈ ran(U)`): if `I_p + (W⁻¹Uᵀa)bᵀ` is
///   regular, the span is preserved — [`OutcomeKind::InRangeRegular`] with
///   `W_new = W + (Uᵀa)bᵀ`, distance 0; otherwise the rank drops and the
///   update is rejected with [`Error::Deflating`].
/// - otherwise → [`OutcomeKind::Generic`]: the closed-form O(np) step, with
///   `distance = arccos(|ω|/‖g‖)` and the quantities attached.
///
/// After any branch that changes `W`, the structure tag degrades to
/// [`WKind::General`]: the added rank-one term destroys triangularity, and
/// a stale tag would corrupt the fast solve path of later updates.
///
/// # Errors
/// [`Error::Deflating`], [`Error::SingularW`], [`Error::ZeroB`] (underflow
/// of `W⁻ᵀb` only — exact zero `b` is a `NoOp`), or a dimension mismatch.
pub fn rank_one_update_with_tol<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
    tol: S,
) -> Result<UpdateOutcome<S>> {
    check_dims(f, up)?;
    if up.b.is_zero() {
        return Ok(UpdateOutcome {
            kind: OutcomeKind::NoOp,
            factorization: f.clone(),
            distance: S::zero(),
            quantities: None,
        });
    }
    let norm_a = up.a.norm();
    let (q_tilde, q_tilde_norm, projected_a) = residual_selective(f.u().mat(), &up.a, norm_a)?;
    let eff_tol = tol * norm_a.max(S::one());

    if q_tilde_norm <= eff_tol {
        if !regular_after_in_range(f.w(), &projected_a, &up.b)? {
            return Err(Error::Deflating);
        }
        let w_new = rank_one_accumulate(f.w().clone(), &projected_a, &up.b, S::one())?;
        return Ok(UpdateOutcome {
            kind: OutcomeKind::InRangeRegular,
            factorization: Factorization::new_unchecked(f.u().clone(), w_new, WKind::General),
            distance: S::zero(),
            quantities: None,
        });
    }

    let qty = quantities_from_parts(f, up, q_tilde, q_tilde_norm, projected_a)?;
    let u_new = update_u(f.u(), &qty)?;
    let w_new = update_w(f.w(), &qty, up, f.u())?;
    let distance = subspace_distance_from_quantities(&qty);
    Ok(UpdateOutcome {
        kind: OutcomeKind::Generic,
        factorization: Factorization::new_unchecked(u_new, w_new, WKind::General),
        distance,
        quantities: Some(qty),
    })
}

// ─── verification helpers ────────────────────────────────────────────────

/// The n×n orthogonal projector onto `ran(X + abᵀ)`, built directly from
/// the update quantities without forming `U_new`:
///
/// ```text
/// Π = (U,q)(U,q)ᵀ − (1/‖g‖²)·h hᵀ,   h = U·w̃ + ω·q
/// ```
///
/// Complexity O(n²p) — intended for verification at moderate n, not for the
/// update path itself.
///
/// # Errors
/// As [`compute_quantities`] (in particular [`Error::InRange`] when
/// `a ∈ ran(U)`).
pub fn projector_update<S: Scalar>(
    f: &Factorization<S>,
    up: &RankOneUpdate<S>,
) -> Result<Matrix<S>> {
    let qty = compute_quantities(f, up)?;
    let (n, p) = f.dims();
    let mut pi = Matrix::<S>::zeros(n, n);
    for j in 0..p {
        let col = f.u().mat().col_vector(j);
        pi.accumulate_outer(&col, &col, S::one());
    }
    pi.accumulate_outer(&qty.q, &qty.q, S::one());

    let mut h = f.u().mat().matvec(&qty.w_tilde)?;
    h.add_scaled_in_place(qty.omega, &qty.q);
    let scale = -S::one() / (qty.g_norm * qty.g_norm);
    pi.accumulate_outer(&h, &h, scale);
    Ok(pi)
}

/// The Riemannian distance `arccos(|ω|/‖g‖) ∈ (0, π/2]` between the spans
/// of `X` and `X + abᵀ`, straight from the quantities (no extra linear
/// algebra). The ratio is clamped to 1 against rounding overshoot.
pub fn subspace_distance_from_quantities<S: Scalar>(qty: &UpdateQuantities<S>) -> S {
    let ratio = (qty.omega.abs() / qty.g_norm).min(S::one());
    ratio.acos()
}

// ─── tests ───────────────────────────────────────────────────────────────
