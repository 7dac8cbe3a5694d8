//! Reproducible random problem instances for tests and benchmarks.
//!
//! All generators draw from a seeded [`ChaCha8Rng`], so a given seed yields
//! the same factorization on every platform. Matrices come out of a
//! Householder QR of Gaussian data and are orthonormal by construction;
//! `W` factors are built with singular values bounded away from zero so the
//! instances are safely invertible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{householder_qr, Matrix, Vector};
use crate::update::{Factorization, OrthonormalFactor, RankOneUpdate, WKind};

/// A deterministic RNG for the given seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One standard-normal draw (Box–Muller transform).
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| standard_normal(rng))
}

fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize) -> Vector {
    Vector::from_fn(len, |_| standard_normal(rng))
}

/// A Haar-distributed n×p orthonormal matrix (QR of Gaussian data).
///
/// # Panics
/// If `n < p` or `p == 0`.
pub fn random_orthonormal(rng: &mut ChaCha8Rng, n: usize, p: usize) -> OrthonormalFactor {
    assert!(n >= p && p > 0, "need n >= p >= 1, got n = {n}, p = {p}");
    let (q, _) = householder_qr(&gaussian_matrix(rng, n, p))
        .expect("tall Gaussian matrix always factors");
    OrthonormalFactor::new_unchecked(q)
}

/// A random factorization with orthonormal `U` and a well-conditioned
/// general `W`: two Haar p×p orthogonal factors around a diagonal with
/// entries uniform in `[0.5, 2]`, so the condition number stays below 4.
///
/// # Panics
/// If `n < p` or `p == 0`.
pub fn random_factorization(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Factorization {
    let u = random_orthonormal(rng, n, p);
    let qa = random_orthonormal(rng, p, p);
    let qb = random_orthonormal(rng, p, p);
    let mut scaled = Matrix::zeros(p, p);
    for j in 0..p {
        let sigma = 0.5 + 1.5 * rng.gen::<f64>();
        for i in 0..p {
            scaled.set(i, j, qa.mat().at(i, j) * sigma);
        }
    }
    let w = scaled
        .matmul(&qb.mat().transpose())
        .expect("p x p product is conformable");
    Factorization::new_unchecked(u, w, WKind::General)
}

/// A Gaussian rank-one update: `a ∈ Rⁿ`, `b ∈ Rᵖ`, all entries standard
/// normal. With probability one such an `a` lies outside any fixed
/// p-dimensional subspace, so the update is generic.
pub fn random_update(rng: &mut ChaCha8Rng, n: usize, p: usize) -> RankOneUpdate {
    RankOneUpdate {
        a: gaussian_vector(rng, n),
        b: gaussian_vector(rng, p),
    }
}

/// An update that exactly deflates `X = U W`: pick `x` and set `a = X x`,
/// `b = −b̃/(b̃ᵀx)`, so that `(X + abᵀ)x = X x − X x·(b̃ᵀx)/(b̃ᵀx) = 0` —
/// the new matrix annihilates `x` and the rank drops. The scaling draw is
/// rejected until `|b̃ᵀx| ≥ 0.1·‖b̃‖‖x‖` to keep `b` well-sized.
pub fn random_deflating_update(rng: &mut ChaCha8Rng, f: &Factorization) -> RankOneUpdate {
    let (_, p) = f.dims();
    let x = gaussian_vector(rng, p);
    let wx = f.w().matvec(&x).expect("shapes agree by construction");
    let a = f.u().mat().matvec(&wx).expect("shapes agree by construction");
    let scale_floor = 0.1 * x.norm();
    loop {
        let b_raw = gaussian_vector(rng, p);
        let d = b_raw.dot(&x).expect("equal lengths");
        if d.abs() >= scale_floor * b_raw.norm() {
            return RankOneUpdate {
                a,
                b: b_raw.scaled(-1.0 / d),
            };
        }
    }
}

/// An update with `a ∈ ran(X)` that preserves the span: `a = X x` and `b`
/// redrawn until `|1 + bᵀx|` is safely large, so the update stays regular.
pub fn random_in_range_update(rng: &mut ChaCha8Rng, f: &Factorization) -> RankOneUpdate {
    let (_, p) = f.dims();
    let x = gaussian_vector(rng, p);
    let wx = f.w().matvec(&x).expect("shapes agree by construction");
    let a = f.u().mat().matvec(&wx).expect("shapes agree by construction");
    loop {
        let b = gaussian_vector(rng, p);
        let d = b.dot(&x).expect("equal lengths");
        if (1.0 + d).abs() > 0.5 {
            return RankOneUpdate { a, b };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_reproduces_the_instance() {
        let f1 = random_factorization(&mut rng_from_seed(5), 10, 3);
        let f2 = random_factorization(&mut rng_from_seed(5), 10, 3);
        assert_eq!(
            f1.reconstruct().sub(&f2.reconstruct()).unwrap().max_abs(),
            0.0,
            "identical seeds must give identical instances"
        );
    }

    #[test]
    fn standard_normal_has_plausible_moments() {
        let mut rng = rng_from_seed(99);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = standard_normal(&mut rng);
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.05, "sample mean = {mean}");
        assert!((var - 1.0).abs() < 0.05, "sample variance = {var}");
    }

    #[test]
    fn random_orthonormal_is_orthonormal() {
        let mut rng = rng_from_seed(17);
        let u = random_orthonormal(&mut rng, 40, 7);
        assert!(u.orthonormality_defect() <= 1e-14);
    }

    #[test]
    fn random_factorization_w_is_well_conditioned() {
        let mut rng = rng_from_seed(29);
        let f = random_factorization(&mut rng, 15, 6);
        let svd = crate::linalg::small_svd(f.w()).unwrap();
        let smax = svd.singular_values[0];
        let smin = svd.singular_values[5];
        assert!(smin >= 0.5 - 1e-12 && smax <= 2.0 + 1e-12);
    }

    #[test]
    fn deflating_instance_annihilates_a_direction() {
        let mut rng = rng_from_seed(37);
        let f = random_factorization(&mut rng, 12, 4);
        let up = random_deflating_update(&mut rng, &f);
        let x_new = crate::linalg::rank_one_accumulate(f.reconstruct(), &up.a, &up.b, 1.0)
            .unwrap();
        let svd = crate::linalg::small_svd(&x_new).unwrap();
        let smin = svd.singular_values[3];
        assert!(smin <= 1e-12 * svd.singular_values[0], "smallest σ = {smin:e}");
    }

    #[test]
    fn in_range_instance_has_negligible_residual() {
        let mut rng = rng_from_seed(41);
        let f = random_factorization(&mut rng, 12, 4);
        let up = random_in_range_update(&mut rng, &f);
        let (_, resid_norm) =
            crate::linalg::orthogonal_residual(f.u().mat(), &up.a).unwrap();
        assert!(resid_norm <= 1e-13 * up.a.norm());
    }
}
