//! Rank-one updates of orthogonal factorizations in closed form.
//!
//! Given a factorization `X = U W` with orthonormal `U` (n×p) and invertible
//! `W` (p×p), this crate updates it after a rank-one change `X + a bᵀ`
//! without refactorizing: the new orthonormal factor is reached by a single
//! closed-form rotation in the plane spanned by one basis combination and
//! the residual direction of `a`, in O(np) arithmetic. Around that core sit
//! subspace geometry utilities (geodesics, principal angles), classical
//! update baselines for comparison, a streaming tracker, text I/O, and an
//! operation-counting bench harness.
//!
//! Everything numerical is generic over the scalar type (`f64` by default,
//! `f32` supported) via the [`Scalar`] trait.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod geometry;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod streaming;
pub mod update;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use baselines::{
    brand_update, elementary_update, full_refactor, kaufman_update, wedderburn_classify,
    AugmentedFactor, ClassificationKind, UpdateClassification,
};
pub use bench::{
    count_update_flops, current_op_counts, reset_op_counts, time_update, BenchStats, Counted,
    OpCount,
};
pub use geometry::{
    geodesic_general, geodesic_rank1, principal_angles, subspace_distance, tangent_from_update,
    PrincipalAngles, RankOneTangent, TangentVector,
};
pub use io::{
    read_matrix, read_report, read_update_stream, write_matrix, write_report,
    write_update_stream,
};
pub use linalg::{Matrix, Vector};
pub use streaming::{
    absorb_reorthogonalization, track, Method, StepReport, TrackError, TrackerConfig,
};
pub use update::{
    compute_quantities, projector_update, rank_one_update, subspace_distance_from_quantities,
    update_u, update_w, Factorization, OrthonormalFactor, OutcomeKind, RankOneUpdate,
    UpdateOutcome, UpdateQuantities, WKind,
};

/// Single-precision dense matrix.
pub type Matrix32 = Matrix<f32>;
/// Double-precision dense matrix (the default for bare [`Matrix`]).
pub type Matrix64 = Matrix<f64>;
/// Single-precision dense vector.
pub type Vector32 = Vector<f32>;
/// Double-precision dense vector (the default for bare [`Vector`]).
pub type Vector64 = Vector<f64>;
