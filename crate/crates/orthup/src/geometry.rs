//! Subspace geometry: geodesics, tangent vectors, principal angles, and
//! Riemannian distance between p-dimensional subspaces of Rⁿ.
//!
//! A subspace is represented by any matrix with orthonormal columns
//! ([`OrthonormalFactor`]); all quantities here depend only on the column
//! span. Tangent directions at a subspace are n×p matrices `Δ` with
//! `UᵀΔ = 0`, and the geodesic through `U` with velocity `Δ = Φ S Ψᵀ`
//! (thin SVD) is
//!
//! ```text
//! γ(t) = U·Ψ·cos(tS)·Ψᵀ + Φ·sin(tS)·Ψᵀ
//! ```
//!
//! For a rank-one direction `Δ = s·q·wᵀ` this collapses to a single-plane
//! rotation evaluated in O(np) ([`geodesic_rank1`]); the general form
//! ([`geodesic_general`]) serves as the independent oracle. Distances are
//! Euclidean norms of principal-angle vectors: `θ_k = arccos(σ_k)` for the
//! singular values of `UᵀV`.

use crate::error::{Error, Result};
use crate::linalg::{rank_one_accumulate, small_svd, Matrix, Vector};
use crate::scalar::Scalar;
use crate::update::{OrthonormalFactor, UpdateQuantities};

/// Tolerance on `‖baseᵀΔ‖_F / ‖Δ‖_F` for tangency (at `f64`; calibrated
/// for other precisions).
pub const TANGENCY_TOL: f64 = 1e-10;

/// Tolerance on `|‖q‖ − 1|` and `|‖w‖ − 1|` for the unit vectors of a
/// rank-one tangent (at `f64`; calibrated elsewhere).
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A tangent direction `Δ` at the subspace spanned by `base`: an n×p
/// matrix with `baseᵀΔ = 0`.
#[derive(Debug, Clone)]
pub struct TangentVector<S: Scalar = f64> {
    base: OrthonormalFactor<S>,
    delta: Matrix<S>,
}

impl<S: Scalar> TangentVector<S> {
    /// Validates shape agreement and tangency:
    /// `‖baseᵀΔ‖_F ≤ tol·‖Δ‖_F` with the calibrated [`TANGENCY_TOL`].
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] or [`Error::NotTangent`].
    pub fn new(base: OrthonormalFactor<S>, delta: Matrix<S>) -> Result<Self> {
        if delta.rows() != base.rows() || delta.cols() != base.cols() {
            return Err(Error::DimensionMismatch {
                context: "TangentVector::new",
                expected: format!("{}x{}", base.rows(), base.cols()),
                got: format!("{}x{}", delta.rows(), delta.cols()),
            });
        }
        let cross = base.mat().transpose().matmul(&delta)?;
        let defect = cross.frobenius_norm();
        let tol = S::calibrated(TANGENCY_TOL) * delta.frobenius_norm();
        if defect > tol {
            return Err(Error::NotTangent {
                context: "TangentVector::new",
                defect: defect.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
        Ok(Self { base, delta })
    }

    /// The base point whose tangent space holds `delta`.
    pub fn base(&self) -> &OrthonormalFactor<S> {
        &self.base
    }

    /// The direction matrix `Δ`.
    pub fn delta(&self) -> &Matrix<S> {
        &self.delta
    }
}

/// A rank-one tangent direction `Δ = s·q·wᵀ` at `base`: unit `q ∈ Rⁿ`
/// orthogonal to the base, unit `w ∈ Rᵖ`, speed `s ≥ 0`.
#[derive(Debug, Clone)]
pub struct RankOneTangent<S: Scalar = f64> {
    base: OrthonormalFactor<S>,
    q: Vector<S>,
    w: Vector<S>,
    s: S,
}

impl<S: Scalar> RankOneTangent<S> {
    /// Validates lengths, unit norms of `q` and `w` (calibrated
    /// [`UNIT_NORM_TOL`]), orthogonality `baseᵀq ≈ 0` (calibrated
    /// [`TANGENCY_TOL`]), and `s ≥ 0`.
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`], [`Error::InvalidConfig`] for norm or
    /// speed violations, [`Error::NotTangent`] for `q` leaning into the base.
    pub fn new(base: OrthonormalFactor<S>, q: Vector<S>, w: Vector<S>, s: S) -> Result<Self> {
        if q.len() != base.rows() || w.len() != base.cols() {
            return Err(Error::DimensionMismatch {
                context: "RankOneTangent::new",
                expected: format!("q of length {}, w of length {}", base.rows(), base.cols()),
                got: format!("q of length {}, w of length {}", q.len(), w.len()),
            });
        }
        let unit_tol = S::calibrated(UNIT_NORM_TOL);
        if (q.norm() - S::one()).abs() > unit_tol || (w.norm() - S::one()).abs() > unit_tol {
            return Err(Error::InvalidConfig {
                message: format!(
                    "rank-one tangent needs unit directions: got norms {} and {}",
                    q.norm().to_f64_lossy(),
                    w.norm().to_f64_lossy()
                ),
            });
        }
        if !(s >= S::zero()) || !s.is_finite() {
            return Err(Error::InvalidConfig {
                message: format!("tangent speed must be finite and >= 0, got {s:?}"),
            });
        }
        let cross = base.mat().matvec_transposed(&q)?;
        let defect = cross.norm();
        let tol = S::calibrated(TANGENCY_TOL);
        if defect > tol {
            return Err(Error::NotTangent {
                context: "RankOneTangent::new",
                defect: defect.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
        Ok(Self { base, q, w, s })
    }

    /// The base point.
    pub fn base(&self) -> &OrthonormalFactor<S> {
        &self.base
    }

    /// The unit normal direction `q` (orthogonal to the base).
    pub fn q(&self) -> &Vector<S> {
        &self.q
    }

    /// The unit coefficient direction `w`.
    pub fn w(&self) -> &Vector<S> {
        &self.w
    }

    /// The speed `s`, so that `Δ = s·q·wᵀ`.
    pub fn s(&self) -> S {
        self.s
    }

    /// Materializes `Δ = s·q·wᵀ` as a dense tangent vector.
    pub fn dense(&self) -> TangentVector<S> {
        let delta = rank_one_accumulate(
            Matrix::zeros(self.base.rows(), self.base.cols()),
            &self.q,
            &self.w,
            self.s,
        )
        .expect("lengths validated at construction");
        TangentVector {
            base: self.base.clone(),
            delta,
        }
    }
}

/// Principal angles between two p-dimensional subspaces, stored ascending
/// in `[0, π/2]`.
#[derive(Debug, Clone)]
pub struct PrincipalAngles<S: Scalar = f64> {
    thetas: Vector<S>,
}

impl<S: Scalar> PrincipalAngles<S> {
    /// Wraps an angle vector, validating the ascending order and the range.
    ///
    /// # Errors
    /// [`Error::InvalidConfig`] when an angle leaves `[0, π/2]` or the
    /// sequence decreases.
    pub fn new(thetas: Vector<S>) -> Result<Self> {
        let half_pi = S::from_f64_lossy(std::f64::consts::FRAC_PI_2);
        let mut prev = S::zero();
        for k in 0..thetas.len() {
            let th = thetas[k];
            if !(th >= S::zero()) || th > half_pi {
                return Err(Error::InvalidConfig {
                    message: format!("principal angle {k} out of [0, pi/2]: {th:?}"),
                });
            }
            if th < prev {
                return Err(Error::InvalidConfig {
                    message: format!("principal angles must ascend; angle {k} decreases"),
                });
            }
            prev = th;
        }
        Ok(Self { thetas })
    }

    /// The angles θ₁ ≤ … ≤ θ_p in radians.
    pub fn thetas(&self) -> &Vector<S> {
        &self.thetas
    }

    /// The Riemannian subspace distance `‖Θ‖₂`.
    pub fn distance(&self) -> S {
        self.thetas.norm()
    }
}

/// Evaluates the geodesic through `base` with velocity `delta` at time `t`.
///
/// The SVD of `Δ` is obtained through the p×p Gram matrix `G = ΔᵀΔ`: its
/// eigenvector factor `Ψ` and eigenvalues `s_i²` give
///
/// ```text
/// γ(t) = U·(Ψ cos(tS) Ψᵀ) + Δ·(Ψ F Ψᵀ),   F_ii = sin(t·s_i)/s_i
/// ```
///
/// where `F_ii` switches to the series `t·(1 − x²/6)`, `x = t·s_i`, below
/// `|x| < 1e-6` — in particular `F_ii = t` exactly on null directions, where
/// `Δψ_i = 0` makes the contribution vanish. Cost O(np²); requires p ≤ 64.
///
/// # Errors
/// - [`Error::InvalidConfig`] when `delta` is anchored at a different base
///   point than `base`.
/// - [`Error::DimensionMismatch`] on shape disagreement.
/// - [`Error::TooLarge`] / [`Error::NoConvergence`] from the p×p SVD.
pub fn geodesic_general<S: Scalar>(
    base: &OrthonormalFactor<S>,
    delta: &TangentVector<S>,
    t: S,
) -> Result<OrthonormalFactor<S>> {
    if delta.base().rows() != base.rows() || delta.base().cols() != base.cols() {
        return Err(Error::DimensionMismatch {
            context: "geodesic_general",
            expected: format!("{}x{} base", base.rows(), base.cols()),
            got: format!("{}x{}", delta.base().rows(), delta.base().cols()),
        });
    }
    if delta.base().mat().sub(base.mat())?.max_abs() != S::zero() {
        return Err(Error::InvalidConfig {
            message: "tangent vector is anchored at a different base point".into(),
        });
    }
    let p = base.cols();
    let gram = delta.delta().transpose().matmul(delta.delta())?;
    let eig = small_svd(&gram)?;
    let psi = eig.v_factor;

    let series_cutoff = S::from_f64_lossy(1e-6);
    let sixth = S::from_f64_lossy(1.0 / 6.0);
    let mut psi_cos = Matrix::<S>::zeros(p, p);
    let mut psi_sinc = Matrix::<S>::zeros(p, p);
    for j in 0..p {
        let s_j = eig.singular_values[j].max(S::zero()).sqrt();
        let x = t * s_j;
        let cos_val = x.cos();
        let sinc_val = if x.abs() < series_cutoff {
            t * (S::one() - x * x * sixth)
        } else {
            x.sin() / s_j
        };
        for i in 0..p {
            psi_cos.set(i, j, psi.at(i, j) * cos_val);
            psi_sinc.set(i, j, psi.at(i, j) * sinc_val);
        }
    }
    let psi_t = psi.transpose();
    let cos_part = psi_cos.matmul(&psi_t)?;
    let sinc_part = psi_sinc.matmul(&psi_t)?;
    let result = base
        .mat()
        .matmul(&cos_part)?
        .add(&delta.delta().matmul(&sinc_part)?)?;
    Ok(OrthonormalFactor::new_unchecked(result))
}

/// Evaluates the rank-one geodesic `γ(t) = U + ((cos(ts)−1)·U·w + sin(ts)·q)·wᵀ`
/// in O(np). The result has orthonormal columns for every `t` because the
/// coefficient pair `(cos(ts), sin(ts))` lies on the unit circle.
///
/// # Example
/// ```
/// use orthup::{Matrix, OrthonormalFactor, Vector};
/// use orthup::geometry::{geodesic_rank1, RankOneTangent};
///
/// let base = OrthonormalFactor::new(Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap()).unwrap();
/// let tv = RankOneTangent::new(
///     base,
///     Vector::from_vec(vec![0.0, 1.0]).unwrap(),
///     Vector::from_vec(vec![1.0]).unwrap(),
///     1.0,
/// ).unwrap();
/// let quarter = geodesic_rank1(&tv, std::f64::consts::FRAC_PI_4);
/// assert!((quarter.mat().at(0, 0) - 0.5_f64.sqrt()).abs() <= 1e-15);
/// assert!((quarter.mat().at(1, 0) - 0.5_f64.sqrt()).abs() <= 1e-15);
/// ```
pub fn geodesic_rank1<S: Scalar>(tv: &RankOneTangent<S>, t: S) -> OrthonormalFactor<S> {
    let ts = t * tv.s;
    let coef_u = ts.cos() - S::one();
    let coef_q = ts.sin();
    let uw = tv
        .base
        .mat()
        .matvec(&tv.w)
        .expect("lengths validated at construction");
    let mut v = uw.scaled(coef_u);
    v.add_scaled_in_place(coef_q, &tv.q);
    let mat = rank_one_accumulate(tv.base.mat().clone(), &v, &tv.w, S::one())
        .expect("lengths validated at construction");
    OrthonormalFactor::new_unchecked(mat)
}

/// Principal angles between the spans of `u` and `v`:
/// `θ_k = arccos(clamp(σ_k, 0, 1))` for the singular values of `UᵀV`,
/// returned ascending. Requires equal shapes and p ≤ 64.
///
/// Angles near 0 carry only about half machine precision — `arccos`
/// flattens as σ → 1 — so same-subspace comparisons should allow ~1e-7.
///
/// # Errors
/// [`Error::DimensionMismatch`], or SVD errors for p > 64 / no convergence.
pub fn principal_angles<S: Scalar>(
    u: &OrthonormalFactor<S>,
    v: &OrthonormalFactor<S>,
) -> Result<PrincipalAngles<S>> {
    if u.rows() != v.rows() || u.cols() != v.cols() {
        return Err(Error::DimensionMismatch {
            context: "principal_angles",
            expected: format!("{}x{}", u.rows(), u.cols()),
            got: format!("{}x{}", v.rows(), v.cols()),
        });
    }
    let cross = u.mat().transpose().matmul(v.mat())?;
    let svd = small_svd(&cross)?;
    let p = u.cols();
    let mut thetas = vec![S::zero(); p];
    for k in 0..p {
        let sigma = svd.singular_values[k].max(S::zero()).min(S::one());
        thetas[k] = sigma.acos();
    }
    PrincipalAngles::new(Vector::from_vec(thetas)?)
}

/// The Riemannian distance `‖Θ‖₂` between the spans of `u` and `v`.
///
/// # Example
/// ```
/// use orthup::{Matrix, OrthonormalFactor};
/// use orthup::geometry::subspace_distance;
///
/// let s = 0.5_f64.sqrt();
/// let u = OrthonormalFactor::new(Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap()).unwrap();
/// let v = OrthonormalFactor::new(Matrix::from_vec(2, 1, vec![s, s]).unwrap()).unwrap();
/// assert!((subspace_distance(&u, &v).unwrap() - std::f64::consts::FRAC_PI_4).abs() <= 1e-12);
/// ```
///
/// # Errors
/// As [`principal_angles`].
pub fn subspace_distance<S: Scalar>(
    u: &OrthonormalFactor<S>,
    v: &OrthonormalFactor<S>,
) -> Result<S> {
    Ok(principal_angles(u, v)?.distance())
}

/// The unit-speed rank-one tangent of a computed update: direction
/// `Δ = q·wᵀ` with `s = 1`, so that the geodesic from `base` reaches the
/// updated subspace at `t = t*` ([`UpdateQuantities::t_star`]).
///
/// # Errors
/// Constructor validation errors — possible only for quantities that did
/// not come from the same `base`.
pub fn tangent_from_update<S: Scalar>(
    qty: &UpdateQuantities<S>,
    base: &OrthonormalFactor<S>,
) -> Result<RankOneTangent<S>> {
    RankOneTangent::new(base.clone(), qty.q.clone(), qty.w_unit.clone(), S::one())
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Subspace distance through `‖sin Θ‖` = singular values of the
    /// projected residual `(I − UUᵀ)V`. Sharp for tiny angles, where the
    /// arccos form saturates at its ~1e-7 conditioning floor; for angles in
    /// `[0, π/2]` it bounds the geodesic distance within a factor of π/2.
    pub(crate) fn sine_distance<S: Scalar>(
        u: &OrthonormalFactor<S>,
        v: &OrthonormalFactor<S>,
    ) -> S {
        let cross = u.mat().transpose().matmul(v.mat()).unwrap();
        let resid = v.mat().sub(&u.mat().matmul(&cross).unwrap()).unwrap();
        let svd = small_svd(&resid).unwrap();
        svd.singular_values
            .iter()
            .fold(S::zero(), |acc, s| acc.mac(*s, *s))
            .sqrt()
    }
}
